"""Tests for utils.py"""

import math
import os
from abc import ABCMeta, abstractmethod

import pytest

from eigenbound import utils

ENV_KAPPA = "EIGENBOUND_KAPPA"
ENV_MAX_CONCURRENCY = "EIGENBOUND_MAX_CONCURRENCY"


@pytest.fixture
def env_var():
    current_env = dict(os.environ)
    os.environ[ENV_KAPPA] = "0.5"
    os.environ[ENV_MAX_CONCURRENCY] = "4"

    yield
    os.environ.clear()
    os.environ.update(current_env)


@pytest.fixture
def no_env_var():
    current_env = dict(os.environ)
    os.environ.pop(ENV_KAPPA, None)
    os.environ.pop(ENV_MAX_CONCURRENCY, None)

    yield
    os.environ.clear()
    os.environ.update(current_env)


@pytest.fixture
def empty_env_var():
    current_env = dict(os.environ)
    os.environ[ENV_KAPPA] = ""

    yield
    os.environ.clear()
    os.environ.update(current_env)


def test_env_var_defaults(no_env_var):
    assert utils.EnvVarConstants.KAPPA == 1.0
    assert utils.EnvVarConstants.MAX_CONCURRENCY == -1


def test_env_var_cast_to_default_type(env_var):
    """Values read from the environment take the type of the default."""
    kappa = utils.EnvVarConstants.KAPPA
    concurrency = utils.EnvVarConstants.MAX_CONCURRENCY
    assert kappa == 0.5 and isinstance(kappa, float)
    assert concurrency == 4 and isinstance(concurrency, int)


def test_env_var_empty_uses_default(empty_env_var):
    assert utils.EnvVarConstants.KAPPA == 1.0


def test_env_var_read_lazily(no_env_var):
    assert utils.EnvVarConstants.KAPPA == 1.0
    os.environ[ENV_KAPPA] = "2.5"
    assert utils.EnvVarConstants.KAPPA == 2.5


def test_abstract_classattributes_missing():
    @utils.abstract_classattributes("name")
    class Base:
        pass

    with pytest.raises(NotImplementedError, match='"name"'):

        class Child(Base):
            pass


def test_abstract_classattributes_defined():
    @utils.abstract_classattributes("name", "n")
    class Base:
        pass

    class Child(Base):
        name = "child"
        n = 2

    assert Child.name == "child"


def test_abstract_classattributes_abstract_intermediate():
    """Abstract intermediate classes may leave attributes to their subclasses."""

    @utils.abstract_classattributes("name")
    class Base(metaclass=ABCMeta):
        @abstractmethod
        def f(self):
            pass

    class Intermediate(Base):
        pass

    class Leaf(Intermediate):
        name = "leaf"

        def f(self):
            return 1

    assert Leaf().f() == 1
    assert Intermediate.name is NotImplemented


def test_significant_round_trips():
    value = 0.1
    assert utils.significant(value) == "0.10000000000000001"
    assert float(utils.significant(value)) == value


def test_significant_nan():
    assert utils.significant(math.nan) == "nan"


def test_env_var_name_from_attribute():
    assert utils.EnvVarConstants.__dict__["KAPPA"].name == ENV_KAPPA
    assert utils.EnvVarConstants.__dict__["SCAN_SIZE"].name == "EIGENBOUND_SCAN_SIZE"


def test_abstract_classattributes_keeps_own_hook():
    seen = []

    @utils.abstract_classattributes("name")
    class Base:
        def __init_subclass__(cls, **kwargs):
            super().__init_subclass__(**kwargs)
            seen.append(cls.__name__)

    class Child(Base):
        name = "child"

    assert seen == ["Child"]
