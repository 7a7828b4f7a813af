"""Command-line surface for the adiabatic MPS simulator."""

from sim_cli.cli import main

__all__ = ["main"]
