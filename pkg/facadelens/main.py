"""
Main entry point for FacadeLens.
"""

import sys

from .cli.main import run


def main() -> None:
    """Main entry point."""
    sys.exit(run())


if __name__ == "__main__":
    main()
