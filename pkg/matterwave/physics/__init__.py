"""Numerical core: slit modes, propagation to the screen, intensities, calibration."""
