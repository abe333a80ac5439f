import random
import sys
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings

from covariant_rmatrix.lax import PAULI, RAISING_LOWERING, LaxPair
from covariant_rmatrix.models.modelfile import load_model
from covariant_rmatrix.models.pipeline import ModelContext
from covariant_rmatrix.scalar import I, cos_of, field_jet, sin_of, symbol

settings.register_profile("ci", max_examples=20, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow], derandomize=True)
settings.load_profile("ci")

MODELS = ("sine-gordon", "nls", "mkdv")


@pytest.fixture(scope="session")
def contexts():
    return {name: ModelContext(load_model(name)) for name in MODELS}


@pytest.fixture
def rng():
    return random.Random(20240611)


# hand-written Lax pairs, independent of the model files

def J(f, mx=0, mt=0):
    return field_jet(f, mx, mt)


m, beta, lam = symbol("m"), symbol("beta"), symbol("lambda")
HALF_BETA = (("beta", 1),)


def sg_lax():
    k0 = m * (lam + 1 / lam) / 4
    k1 = m * (lam - 1 / lam) / 4
    s2 = sin_of("phi", HALF_BETA, Fraction(1, 2))
    c2 = cos_of("phi", HALF_BETA, Fraction(1, 2))
    return LaxPair(PAULI,
                   {"sigma1": -I * k0 * s2, "sigma2": -I * k1 * c2, "sigma3": -I * beta / 4 * J("phi", 0, 1)},
                   {"sigma1": -I * k1 * s2, "sigma2": -I * k0 * c2, "sigma3": -I * beta / 4 * J("phi", 1, 0)})


def nls_lax():
    q, r = J("q"), J("r")
    return LaxPair(RAISING_LOWERING,
                   {"sigma3": -I * lam / 2, "sigma+": q, "sigma-": r},
                   {"sigma3": lam ** 2 / (2 * I) - I * q * r,
                    "sigma+": lam * q + I * J("q", 1), "sigma-": lam * r - I * J("r", 1)})


def mkdv_lax():
    q, r = J("q"), J("r")
    return LaxPair(RAISING_LOWERING,
                   {"sigma3": -I * lam / 2, "sigma+": q, "sigma-": r},
                   {"sigma3": -lam ** 3 / (2 * I) + I * lam * q * r + J("r", 1) * q - J("q", 1) * r,
                    "sigma+": -lam ** 2 * q - I * lam * J("q", 1) + J("q", 2) - 2 * q ** 2 * r,
                    "sigma-": -lam ** 2 * r + I * lam * J("r", 1) + J("r", 2) - 2 * q * r ** 2})


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(mod.LINES):
        terminalreporter.write_line(line)
