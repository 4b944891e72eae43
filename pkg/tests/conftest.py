import numpy as np
import pytest
from hypothesis import strategies as st

from dipolarq.model import ReducedParams

reduced = st.floats(-40, 40, allow_nan=False)
moderate = st.floats(-12, 12, allow_nan=False)
angles_theta = st.floats(0, np.pi, allow_nan=False)
angles_phi = st.floats(0, 2 * np.pi, allow_nan=False)


@st.composite
def params(draw, coord=reduced):
    return ReducedParams(draw(coord), draw(coord))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_density(rng, d=4):
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    m = g @ g.conj().T
    return m / np.trace(m).real
