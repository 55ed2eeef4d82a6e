"""Shared helpers for randomized test families."""

import random

from defzeta.cohomology import monomials_of_degree
from defzeta.family import validate_family


def small_family(seed, d=3, n=2, p=5):
    """Random diagonal-plus-deformation family with unit diagonal."""
    rng = random.Random(seed)
    terms = {}
    for i in range(n + 1):
        u = tuple(d if j == i else 0 for j in range(n + 1))
        terms[u] = [rng.choice([1, 2, 3, 4])]
    for u in monomials_of_degree(n + 1, d):
        if u not in terms and rng.random() < 0.6:
            cs = [0, rng.randint(-3, 3)]
            if cs[1]:
                terms[u] = cs
    return validate_family(n, d, p, terms)


QUINTIC_TERMS = {(5, 0, 0): [1], (0, 5, 0): [1], (0, 0, 5): [1], (1, 1, 3): [0, 1]}
K3_TERMS = {
    (4, 0, 0, 0): [1],
    (0, 4, 0, 0): [1],
    (0, 0, 4, 0): [1],
    (0, 0, 0, 4): [1],
    (1, 1, 1, 1): [0, 1],
}

QUINTIC_EXPONENTS = {
    "finite_default": {"lambdas": [-1, 0]},
    "infinity": {
        "lambdas": ["-2/3", "2/3", "1", "4/3", "7/3", "8/3", "13/3", "14/3"],
        "ord_z_W": -2,
        "ord_z_Winv": -2,
        "ordp_W_pair": 0,
    },
}
K3_EXPONENTS = {
    "finite_default": {"lambdas": ["-3/2", "-1/2", "0"]},
    "infinity": {
        "lambdas": [1, 2, 3],
        "ord_z_W": 0,
        "ord_z_Winv": -2,
        "ordp_W_pair": 0,
    },
}

# Conway polynomials (standard presentation data; computed with
# tools/conway.py and cross-checked by the published zeta values the
# acceptance suite reproduces)
CONWAY_3_20 = [2, 1, 0, 2, 2, 2, 0, 0, 1, 1, 1, 1, 0, 2, 0, 0, 0, 0, 0, 0, 1]
CONWAY_11_10 = [2, 6, 6, 10, 8, 7, 0, 0, 0, 0, 1]
