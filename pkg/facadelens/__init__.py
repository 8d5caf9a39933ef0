"""
FacadeLens - building attribute estimation from facade images.

This package cleans and splits a facade image corpus, trains a multi-task
network (construction year, building structure, property type), derives the
fireproof class by rule, and evaluates every stage.
"""

__version__ = "0.1.0"
__author__ = "FacadeLens Team"
