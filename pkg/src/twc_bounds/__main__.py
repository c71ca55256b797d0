"""Allow `python -m twc_bounds ...` invocation."""

from .cli import main

if __name__ == "__main__":
    main()
