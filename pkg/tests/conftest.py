"""Shared cached builders so repeated model construction stays cheap."""

from functools import lru_cache

from bcft.fusion import verlinde
from bcft.modular_data import build_minimal, build_su2


@lru_cache(maxsize=None)
def su2(k: int, precision: int = 50):
    return build_su2(k, precision)


@lru_cache(maxsize=None)
def minimal(p: int, pp: int, precision: int = 50):
    return build_minimal(p, pp, precision)


@lru_cache(maxsize=None)
def fusion_su2(k: int):
    return verlinde(su2(k))


@lru_cache(maxsize=None)
def fusion_minimal(p: int, pp: int):
    return verlinde(minimal(p, pp))


def all_coprime_pairs(p_max: int):
    """(p, p') with 2 <= p' < p <= p_max, gcd 1."""
    import math

    return [
        (p, pp)
        for p in range(3, p_max + 1)
        for pp in range(2, p)
        if math.gcd(p, pp) == 1
    ]
