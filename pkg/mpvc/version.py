"""Versão do MPVC Lab, usada em --version e nos relatórios JSON."""

__version__ = "0.4.0"
