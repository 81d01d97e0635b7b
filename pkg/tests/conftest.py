"""共享模型夹具"""

from pathlib import Path

import pytest

from otcoh.characters import Backend, classify_all
from otcoh.numberfield import Polynomial
from otcoh.solvmodel import build_model, synthetic_model

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def cubic_polynomial() -> Polynomial:
    """x^3 - x - 1"""
    return Polynomial(coeffs=[-1, -1, 0, 1])


@pytest.fixture(scope="session")
def cubic_model(cubic_polynomial):
    """s = t = 1，U = {θ}"""
    return build_model(cubic_polynomial, [cubic_polynomial.theta()])


@pytest.fixture(scope="session")
def cubic_classes(cubic_model):
    return classify_all(cubic_model, Backend.NUMERIC)


@pytest.fixture(scope="session")
def paired_model():
    """s = t = 2，关系 x1+ψ1+ψ̄1 = x2+ψ2+ψ̄2 = 0，generic C"""
    return synthetic_model(
        2,
        2,
        [[-1, 0], [0, -1]],
        relations=[[1, 0, 1, 0, 1, 0], [0, 1, 0, 1, 0, 1]],
    )


@pytest.fixture(scope="session")
def paired_classes(paired_model):
    return classify_all(paired_model, Backend.GENERIC)


@pytest.fixture(scope="session")
def t1_model():
    """s = t = 1，只有幺模关系"""
    return synthetic_model(1, 1, [[-1]])


@pytest.fixture(scope="session")
def t1_classes(t1_model):
    return classify_all(t1_model, Backend.GENERIC)


@pytest.fixture(scope="session")
def explicit_model():
    """s = 1, t = 1，显式 C，可同时用两种后端"""
    return synthetic_model(1, 1, [[-1]], generator_args=[["1/3"]])
