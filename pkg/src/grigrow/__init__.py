"""Workbench for the first Grigorchuk group, its ray-orbit Schreier graph,
permutational wreath products and imbeddings into groups of intermediate growth."""

__version__ = "0.1.0"
