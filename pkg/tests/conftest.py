import numpy as np
import pytest
from hypothesis import strategies as st

from xmetrology.state_core import XState


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@st.composite
def x_states(draw, floor: float = 0.0):
    """Valid X-states built from four populations and two coherence fractions."""
    w = draw(st.lists(st.floats(0.01, 1.0), min_size=4, max_size=4))
    d = np.array(w) / sum(w)
    d = (1 - floor) * d + floor / 4
    r14, r23 = draw(st.floats(0.0, 0.99)), draw(st.floats(0.0, 0.99))
    ph14, ph23 = draw(st.floats(0.0, 2 * np.pi)), draw(st.floats(0.0, 2 * np.pi))
    a14 = r14 * np.sqrt(d[0] * d[3]) * np.exp(1j * ph14)
    a23 = r23 * np.sqrt(d[1] * d[2]) * np.exp(1j * ph23)
    return XState(d[0], d[1], d[2], 1.0 - d[0] - d[1] - d[2], a14, a23)
