"""
Test suite for the approximate support uncertainty toolkit.
"""
