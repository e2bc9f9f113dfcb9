"""HTTP service wrapping the library; the CLI is a client of this app."""
