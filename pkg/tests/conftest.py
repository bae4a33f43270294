import numpy as np
import pytest

from rdlab import DigitSystem

# digit systems used across the oracle tests
SYSTEMS = [
    DigitSystem.parse(t)
    for t in (
        "q10-x0", "q10-x1", "q10-x4", "q10-x7", "q10-x9",
        "q10-x0,7", "q10-x2,5,8", "q3-x1", "q7-x0,6", "q12-x5",
    )
]


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
