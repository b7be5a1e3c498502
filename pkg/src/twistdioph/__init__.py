"""Exact arithmetic on the self-twist of an elliptic curve, the ring of
multiples of its canonical section, and a compiler from integer polynomial
systems to positive-existential formulas over Q(x)."""

from .errors import *  # noqa: F401,F403
from .exact import *  # noqa: F401,F403
from .jets import Jet
from .elliptic import *  # noqa: F401,F403
from .selftwist import *  # noqa: F401,F403
from .lambda_ring import *  # noqa: F401,F403
from .local import *  # noqa: F401,F403
from .formula import *  # noqa: F401,F403
from .gadgets import *  # noqa: F401,F403
from .compiler import *  # noqa: F401,F403

__version__ = "0.1.0"
