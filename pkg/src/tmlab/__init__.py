"""tmlab: numerical laboratory for remainder-strengthened Trudinger-Moser
inequalities on the unit disk."""

__version__ = "0.1.0"
