"""Canonical-lift tests for the elliptic fibres of the Euler top over unramified p-adic rings."""
