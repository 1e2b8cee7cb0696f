"""
Time-domain simulation of DC networks: fixed-step and adaptive integration
with timed load events, and closed-loop phase portraits.
"""
from .integrators import *
