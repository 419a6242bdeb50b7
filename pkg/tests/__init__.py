"""
Test suite for the tree search suite
"""
