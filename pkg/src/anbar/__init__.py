"""Exact graded linear algebra and A_n-structure computations over a field.

Everything is computed with exact scalars (prime fields or rationals) on
finite degree windows.  Results carry explicit certification: a verdict is
only "pass"/"fail" on inputs the window can actually decide, everything
else is reported as unknown.
"""

from anbar.field import Field, QQ
from anbar.graded import GradedSpace
from anbar.multimap import MultiMap

__all__ = ["Field", "QQ", "GradedSpace", "MultiMap"]
__version__ = "0.1.0"
