"""Command-line surface of gm3cert: configs, presets, workflows and sweeps."""
