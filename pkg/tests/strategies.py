"""Hypothesis strategies for tables."""

from hypothesis import strategies as st

from src.assets.groupoid import PartialGroupoid
from src.assets.instances import random_transformation_semigroup


@st.composite
def partial_groupoids(draw, max_order=4):
    n = draw(st.integers(min_value=1, max_value=max_order))
    rows = draw(
        st.lists(
            st.lists(st.integers(min_value=0, max_value=n), min_size=n, max_size=n),
            min_size=n,
            max_size=n,
        )
    )
    return PartialGroupoid(n, tuple(tuple(row) for row in rows))


@st.composite
def total_groupoids(draw, max_order=3):
    n = draw(st.integers(min_value=1, max_value=max_order))
    rows = draw(
        st.lists(
            st.lists(st.integers(min_value=1, max_value=n), min_size=n, max_size=n),
            min_size=n,
            max_size=n,
        )
    )
    return PartialGroupoid(n, tuple(tuple(row) for row in rows))


@st.composite
def transformation_semigroups(draw, max_points=3, max_generators=3):
    """Semigroups generated by random maps on 1..k, at most k^k elements."""
    points = draw(st.integers(min_value=1, max_value=max_points))
    generators = draw(st.integers(min_value=1, max_value=max_generators))
    seed = draw(st.integers(min_value=0, max_value=10**6))
    return random_transformation_semigroup(points, generators, seed=seed)
