"""Tight two-party Bell inequalities from cut-polytope facets."""
