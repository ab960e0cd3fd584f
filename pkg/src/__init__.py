"""l2approx - approximation of L2-invariants through towers of quotients"""

__version__ = "1.0.0"
__author__ = "Team l2approx"
