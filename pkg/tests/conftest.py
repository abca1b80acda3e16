import numpy as np
import pytest

from twistmoments import harness
from twistmoments.curves import load_curve, load_curves

DESK_X = 1_000_000


@pytest.fixture(scope="session")
def all_curves():
    return load_curves()


@pytest.fixture(scope="session")
def curve_11ai():
    return load_curve("11A_i")


@pytest.fixture(scope="session")
def curve_11ar():
    return load_curve("11A_r")


@pytest.fixture(scope="session")
def table_11ai_desk(curve_11ai):
    """Coefficient table for 11A_i to the desk-scale bound (built once)."""
    return curve_11ai.coefficient_table(DESK_X)


@pytest.fixture(scope="session")
def sweep_11ai_desk(curve_11ai, table_11ai_desk):
    return harness.sweep(curve_11ai, DESK_X, table_11ai_desk)


def naive_representation_numbers(form, bound):
    """Brute-force lattice histogram over the box |x_i| <= sqrt(X/lambda_min);
    the independent oracle for the enumeration kernel."""
    gram = form.gram()
    lam = float(np.linalg.eigvalsh(gram).min())
    b = int(np.ceil(np.sqrt(bound / lam)))
    out = np.zeros(bound + 1, dtype=np.int64)
    b1, b2, b3, b4, b5, b6 = form.beta
    z = np.arange(-b, b + 1, dtype=np.int64)
    for x in range(-b, b + 1):
        for y in range(-b, b + 1):
            v = b1 * x * x + b2 * y * y + b3 * z * z + b4 * y * z + b5 * x * z + b6 * x * y
            good = v[(v >= 0) & (v <= bound)]
            np.add.at(out, good, 1)
    return out
