"""HeavenMorph: harmonic morphisms, twistor surfaces and H-space metrics, verified numerically."""

__version__ = "1.0.0"
