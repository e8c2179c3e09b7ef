"""Firm valuation (NAV + goodwill) and internal capital account simulation."""

__version__ = "0.1.0"
