"""
Decentralized voltage controllers for DC networks and the sliding-mode
differentiator that can feed them.
"""
from .differentiators import *
from .pbc import *
from .policies import *
