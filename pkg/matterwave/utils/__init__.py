"""Utility subpackage for matterwave.

This package provides helper modules for logging, flat-file storage of
patterns and data, and small conveniences used by the command modules.
"""
