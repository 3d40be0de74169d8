"""Data package containing the experimental parameter presets.

Each ``<mode>.cfg`` file holds the published parameter block for that run
mode in the run-configuration INI format.  Importing this package does not
read them; ``matterwave.config`` loads a preset on demand when a run
configuration omits keys.
"""
