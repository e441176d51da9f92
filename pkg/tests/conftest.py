"""Shared fixtures: curve models are expensive (period lattices), so build once."""
from fractions import Fraction

import pytest

from heightlab.elliptic import CurveQ, EllipticModel, EPoint
from heightlab.semiabelian import GModel


@pytest.fixture(scope="session")
def em_lemniscatic():
    return EllipticModel(CurveQ(Fraction(-1), Fraction(0)))


@pytest.fixture(scope="session")
def em_37():
    # y^2 = x^3 - 16 x + 16: rank 1, generator (0, 4) of tiny height
    return EllipticModel(CurveQ(Fraction(-16), Fraction(16)))


@pytest.fixture(scope="session")
def em_mordell17():
    # y^2 = x^3 + 17: negative discriminant, several small integral points
    return EllipticModel(CurveQ(Fraction(0), Fraction(17)))


@pytest.fixture(scope="session")
def g_nonsplit(em_37):
    return GModel.from_class_point(em_37, EPoint.exact(0, 4))


@pytest.fixture(scope="session")
def g_split(em_37):
    return GModel(em_37, 0)
