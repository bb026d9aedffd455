"""Monte Carlo simulator and analysis toolkit for random-linear-network-
coding gossip on static and adversarially dynamic networks."""

__version__ = "0.1.0"
