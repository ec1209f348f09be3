import numpy as np
from hypothesis import assume
from hypothesis import strategies as st


@st.composite
def configurations(draw, min_n=2, max_n=6, min_gap=0.15, max_gap=1.0, bound=3.0):
    """Strictly increasing position vectors with bounded entries and gaps."""
    n = draw(st.integers(min_n, max_n))
    gaps = draw(
        st.lists(
            st.floats(min_gap, max_gap, allow_nan=False),
            min_size=n - 1,
            max_size=n - 1,
        )
    )
    span = float(np.sum(gaps))
    assume(span <= 2.0 * bound)
    start = draw(st.floats(-bound, bound - span, allow_nan=False))
    return start + np.concatenate([[0.0], np.cumsum(gaps)])


@st.composite
def velocity_like(draw, n, low=0.5, high=1.5):
    values = draw(st.lists(st.floats(low, high, allow_nan=False), min_size=n, max_size=n))
    return np.asarray(values)


@st.composite
def states(draw, min_n=2, max_n=6, **kwargs):
    q = draw(configurations(min_n=min_n, max_n=max_n, **kwargs))
    v = draw(velocity_like(len(q)))
    return q, v
