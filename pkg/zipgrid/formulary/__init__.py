"""
The formulary subpackage contains the closed-form relations of DC networks
with ZIP loads: load currents and conductances, the open-loop vector
field, Brayton-Moser descriptions and steady states.
"""
from .loads import *
from .dynamics import *
from .brayton_moser import *
from .steady_state import *
