"""Consolidated CLI for the algebroid toolkit."""

import sys

from specio.cli import app, run

__all__ = ["app", "main"]


def main():
    """Entry point for the CLI."""
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
