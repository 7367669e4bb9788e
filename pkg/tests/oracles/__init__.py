"""Independent reference implementations and frozen reference values.

Nothing here imports the package's enumeration or kernel code, so the
tests compare two separate implementations of the same definitions.
"""
