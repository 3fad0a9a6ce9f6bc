"""Cell association and service scheduling for two-tier femtocell networks."""

__version__ = "0.1.0"
