"""
Storage functions, dissipation audits and set-membership analysis of DC
networks.
"""
from .storages import *
from .passivity import *
