//! Library surface of the `morphco` command-line tool.
