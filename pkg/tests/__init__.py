"""Testes do MPVC Lab."""
