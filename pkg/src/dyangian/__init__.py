"""dyangian: exact symbolic kernel and verification harness for DY(sl2)."""

from dyangian.scalars import HSeries, Fraction

__all__ = ["HSeries", "Fraction"]
__version__ = "0.1.0"
