"""Class groups, g-parts of class numbers and the counting quantities behind
average and moment bounds for h_g(-d)."""

__version__ = "0.1.0"
