"""Entry point for ``python -m pyswipt``."""

from .cli import main

if __name__ == "__main__":
    main()
