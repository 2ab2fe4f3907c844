"""Knowledge-base-driven HS-code verification for tariff exemption applications."""

__version__ = "0.1.0"
