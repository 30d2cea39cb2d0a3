"""Development entrypoint.

The installed command is `bicgrad` -> `bicgrad.cli:main`; this file lets
`python main.py all` work from a checkout.
"""

from __future__ import annotations


def main() -> int:
    from bicgrad.cli import main as _main

    return _main()


if __name__ == "__main__":
    raise SystemExit(main())
