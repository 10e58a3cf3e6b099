"""Shared test helpers: independent brute-force oracles kept deliberately
dumb so they certify the fast implementations."""

from __future__ import annotations

import random

import pytest

from fitchmap.core import NO_EVENT, FitchMap, LabeledTree, make_fitch_map


def naive_evaluate(tree: LabeledTree) -> FitchMap:
    """Quadratic-times-depth path scan; independent of evaluate()'s sweep."""
    names = tree.leaf_names
    entries = {}
    for x in names:
        for y in names:
            if x == y:
                continue
            vx, vy = tree.vertex_of(x), tree.vertex_of(y)
            ancestors_x = set()
            v = vx
            while v is not None:
                ancestors_x.add(v)
                v = tree.parent(v)
            walk = [vy]
            while walk[-1] not in ancestors_x:
                walk.append(tree.parent(walk[-1]))
            symbols = {
                tree.label(v) for v in walk[:-1] if tree.label(v) is not NO_EVENT
            }
            if len(symbols) > 1:
                raise AssertionError(f"path conflict on ({x}, {y}): {symbols}")
            entries[(x, y)] = symbols.pop() if symbols else NO_EVENT
    return make_fitch_map(names, entries)


def random_labeling(tree: LabeledTree, alphabet, rng: random.Random) -> LabeledTree:
    """Uniform unconstrained labeling; may well be label-inconsistent."""
    choices = [NO_EVENT] + list(alphabet)
    labels = [None] + [
        choices[rng.randrange(len(choices))] for _ in range(tree.n_vertices - 1)
    ]
    return tree.with_labels(labels)


@pytest.fixture
def rng() -> random.Random:
    return random.Random(0xF17C4)
