"""Command modules for the matterwave command line.

Each module exposes ``register(subparsers, common)`` which adds its
subcommands and binds them to a handler through ``set_defaults(handler=...)``.
Handlers return the process exit status.
"""
