import os

import pytest
from hypothesis import HealthCheck, settings

from eisen.numberfield import NumberField

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

CORPUS = ["x", "x^2+1", "x^2-2", "x^2-x-1", "x^3-x-1", "x^3-2"]


@pytest.fixture(scope="session")
def Q():
    return NumberField("x")


@pytest.fixture(scope="session")
def Qi():
    return NumberField("x^2+1")


@pytest.fixture(scope="session")
def Qsqrt2():
    return NumberField("x^2-2")


@pytest.fixture(scope="session")
def fields():
    return {s: NumberField(s) for s in CORPUS}
