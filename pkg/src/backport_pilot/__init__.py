"""backport-pilot: plan and track package backports into an LTS release."""

__version__ = "0.1.0"
