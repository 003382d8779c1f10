"""Bundled example models."""

from pathlib import Path

VENDING_MACHINE = Path(__file__).parent / "vending-machine"
