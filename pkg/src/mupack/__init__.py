"""Submodular maximization under linear packing constraints by multiplicative updates."""
