"""
Test package for FacadeLens.
"""
