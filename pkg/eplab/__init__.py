"""
EP Lab: closed-form solutions of the Ermakov-Pinney equation with
Chiellini-integrable dissipation, certified against numerical oracles.
"""

__version__ = "0.1.0"
