"""
Pluggable components backed by external models.
"""

from .category_filter import CategoryFilter, HeuristicCategoryFilter, HeuristicThresholds

__all__ = ["CategoryFilter", "HeuristicCategoryFilter", "HeuristicThresholds"]
