"""Online discrepancy minimization under stochastic arrivals.

Thin package wrapper around the C++ extension: cosh-potential tree
balancing, online interval/stripe coloring with exact running-discrepancy
measurement, the ordinal-envy reduction for online fair division, and the
adversarial lower-bound constructions.
"""

from ._discsim import *  # noqa: F401,F403
from ._discsim import __doc__ as _core_doc  # noqa: F401
