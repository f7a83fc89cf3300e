"""Activation compression toolkit."""
