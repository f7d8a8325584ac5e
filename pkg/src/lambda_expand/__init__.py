"""Workbench for lambda-calculus type systems.

Covers plain and substructural simple typing (unrestricted, relevant, affine,
linear, ordered), an intersection-type engine with selectable equality
flavors, and the expansion translations that turn shared variables into
distinct fresh ones while preserving typability.
"""

__version__ = "0.1.0"
