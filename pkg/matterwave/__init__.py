"""Top-level package for the matterwave diffraction simulator.

Importing this package exposes ``run_cli`` from ``matterwave.main``.

Example:
    from matterwave import run_cli

    run_cli(["single", "--out", "single.csv"])
"""

__version__ = "1.0.0"

from .main import main as run_cli  # noqa: E402,F401
