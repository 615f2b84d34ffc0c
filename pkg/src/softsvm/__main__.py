"""Module entry point, equivalent to the installed ``softsvm`` script."""

import sys

from .cli import main

if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
