"""Entry point for python -m mimodof."""

from mimodof.cli import main

if __name__ == "__main__":
    main()
