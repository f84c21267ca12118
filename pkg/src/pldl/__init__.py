"""Parametric linear dynamic logic: automata, model checking and synthesis."""
