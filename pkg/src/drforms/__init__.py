"""Exact verification of identities for Drinfeld modular forms of rank r over F_q[theta]."""

__version__ = "0.1.0"
