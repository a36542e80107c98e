"""Link-level simulator for noncoherent energy-harvesting AF relay networks."""

__version__ = "0.1.0"
