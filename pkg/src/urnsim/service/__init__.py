"""HTTP service wrapping the simulation and analytics library."""
