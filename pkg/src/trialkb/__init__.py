"""Clinical-trial and company-web knowledge pipeline."""

__version__ = "0.1.0"
