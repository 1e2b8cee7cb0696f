"""
Value objects describing DC networks and their states.
"""
__all__ = ["DguParams", "LineParams", "ZipLoad", "Network", "NetworkState",
           "FilterBank", "build_network", "V_MIN", "NOMINAL_VOLTAGE"]

from .network import (DguParams,
                      FilterBank,
                      LineParams,
                      Network,
                      NetworkState,
                      NOMINAL_VOLTAGE,
                      V_MIN,
                      ZipLoad,
                      build_network)
