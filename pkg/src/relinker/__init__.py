"""Toolkit for rediscovering lost web pages via titles and lexical signatures."""

__version__ = "0.1.0"
