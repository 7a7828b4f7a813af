"""Test suite for mps-adiabatic-sim."""
