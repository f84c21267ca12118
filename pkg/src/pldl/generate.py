"""Seeded random formulas for self-tests and cross-validation corpora."""
from __future__ import annotations

import random

from .formula import (
    TT, And, Atom, Bottom, Box, BoxCp, BoxLe, Concat, Diamond, DiamondCp, DiamondLe,
    Formula, NegAtom, Or, PAnd, PNot, PVar, Prop, Regex, Star, Test, Top, Union, size_of,
)


def random_regex(rng: random.Random, budget: int, props, allow_tests: bool = True) -> Regex:
    if budget <= 1:
        roll = rng.random()
        if roll < 0.3:
            return TT
        if roll < 0.45:
            return Prop(PNot(PVar(rng.choice(props))))
        return Prop(PVar(rng.choice(props)))
    kind = rng.choice(["union", "concat", "star", "star", "test"] if allow_tests
                      else ["union", "concat", "star"])
    if kind == "star":
        return Star(random_regex(rng, budget - 1, props, allow_tests))
    if kind == "test":
        return Test(random_formula(rng, min(budget - 1, 2), props, allow_params=False))
    split = rng.randint(1, budget - 1)
    left = random_regex(rng, split, props, allow_tests)
    right = random_regex(rng, budget - split, props, allow_tests)
    return Union(left, right) if kind == "union" else Concat(left, right)


def random_formula(rng: random.Random, budget: int, props=("a", "b"), cp_color: str | None = None,
                   allow_params: bool = False, variables=("x",), box_params: bool = True) -> Formula:
    """A random formula with roughly budget nodes.

    cp_color enables changepoint operators over that color; allow_params
    enables bounded operators over the given variables.
    """
    if budget <= 1:
        roll = rng.random()
        if roll < 0.08:
            return Top()
        if roll < 0.12:
            return Bottom()
        p = rng.choice(props)
        return Atom(p) if rng.random() < 0.6 else NegAtom(p)
    kinds = ["and", "or", "dia", "box"]
    if cp_color:
        kinds += ["dcp", "bcp"]
    if allow_params:
        kinds += ["dle"] + (["ble"] if box_params else [])
    kind = rng.choice(kinds)
    sub = lambda b: random_formula(rng, b, props, cp_color, allow_params, variables, box_params)
    if kind in ("and", "or"):
        split = rng.randint(1, budget - 1)
        left, right = sub(split), sub(budget - split)
        return And(left, right) if kind == "and" else Or(left, right)
    rbudget = rng.randint(1, max(1, budget - 2))
    r = random_regex(rng, rbudget, props, allow_tests=budget > 4)
    body = sub(max(1, budget - 1 - rbudget))
    if kind == "dia":
        return Diamond(r, body)
    if kind == "box":
        return Box(r, body)
    if kind == "dcp":
        return DiamondCp(r, body, cp_color)
    if kind == "bcp":
        return BoxCp(r, body, cp_color)
    var = rng.choice(variables)
    return DiamondLe(r, var, body) if kind == "dle" else BoxLe(r, var, body)


def corpus(count: int, seed: int = 0, max_size: int = 10, **kw) -> list[Formula]:
    """count distinct random formulas with size_of <= max_size."""
    rng = random.Random(seed)
    seen: dict = {}
    attempts = 0
    while len(seen) < count:
        attempts += 1
        if attempts > 200 * count:
            raise RuntimeError("could not generate enough distinct formulas")
        phi = random_formula(rng, rng.randint(1, max_size), **kw)
        if size_of(phi) <= max_size and phi not in seen:
            seen[phi] = None
    return list(seen)
