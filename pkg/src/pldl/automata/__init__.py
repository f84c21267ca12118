"""Automata pipeline: marked NFAs, alternating and nondeterministic Buchi, parity."""
