"""oneway-bounds - executable one-way communication complexity measures and protocols."""

__version__ = "0.1.0"
