import itertools

import numpy as np
from hypothesis import settings
from hypothesis import strategies as st

from evidential import Frame, MassFunction

settings.register_profile("default", max_examples=100, deadline=None)
settings.load_profile("default")


def frame(n: int) -> Frame:
    return Frame.of_size(n)


def subsets(n: int):
    return range(1 << n)


def subset_sum_belief(m: MassFunction, a: int) -> float:
    """Independent oracle: loop over every subset of a."""
    total = 0.0
    for b in range(1, 1 << m.frame.size):
        if b & ~a == 0:
            total += m[b]
    return total


@st.composite
def mass_functions(draw, min_size=1, max_size=6, max_focal=6, n=None):
    size = n if n is not None else draw(st.integers(min_size, max_size))
    f = frame(size)
    k = draw(st.integers(1, max_focal))
    masks = draw(st.lists(st.integers(1, (1 << size) - 1), min_size=k, max_size=k))
    weights = draw(st.lists(st.floats(0.05, 1.0), min_size=k, max_size=k))
    total = sum(weights)
    acc: dict = {}
    for msk, w in zip(masks, weights):
        acc[msk] = acc.get(msk, 0.0) + w / total
    return MassFunction(f, acc)


@st.composite
def mass_pairs(draw, max_size=6):
    n = draw(st.integers(1, max_size))
    return draw(mass_functions(n=n)), draw(mass_functions(n=n))


@st.composite
def bayesians(draw, n):
    w = np.array(draw(st.lists(st.floats(0.05, 1.0), min_size=n, max_size=n)))
    return MassFunction.bayesian(frame(n), w / w.sum())


def all_pairs(n):
    return itertools.product(range(1 << n), repeat=2)
