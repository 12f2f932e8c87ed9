"""testlens: static characterization of Java test suites."""

__version__ = "0.1.0"
