"""minorkit: Cayley-graph balls, complete-graph minors, and low-diameter
cover experiments for finitely generated groups."""

__version__ = "0.1.0"
