"""Zero counting and Bautin-type cyclicity estimates for parametric analytic families."""

__version__ = "0.1.0"
