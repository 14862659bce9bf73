"""Allow running with ``python -m vpbounds``."""

from vpbounds.cli import main

main()
