"""Utilities for eigenbound."""

import inspect
import os
from typing import Any


class EnvVar:
    """A run setting read from ``EIGENBOUND_<ATTRIBUTE>`` on every access.

    Values from the environment are cast to the type of the default; unset or
    empty variables give the default.
    """

    PREFIX = "EIGENBOUND_"

    def __init__(self, default: Any, doc: str = ""):
        self.default = default
        self.name = None
        self.__doc__ = doc

    def __set_name__(self, owner, attribute: str):
        self.name = f"{self.PREFIX}{attribute}"

    def __get__(self, obj, objtype=None):
        value = os.environ.get(self.name)
        return type(self.default)(value) if value else self.default


class EnvVarConstants:
    LOG_LEVEL = EnvVar("INFO", "Level of the eigenbound logger in scripts.")
    MAX_CONCURRENCY = EnvVar(-1, "Sweep items measured at once, -1 for no limit.")
    KAPPA = EnvVar(1.0, "Geodesic sphere radius in units of 1 / lambda.")
    SERIES_ORDER = EnvVar(3, "Highest perturbation series term.")
    SERIES_POINTS = EnvVar(4096, "Size of the rho grid of the series.")
    PROFILE_POINTS = EnvVar(512, "Radii in a spherical mean profile.")
    SCAN_SIZE = EnvVar(64, "Side of the coarse grid of the maximum search.")


def abstract_classattributes(*attributes):
    """Class decorator requiring concrete subclasses to set class attributes.

    The attributes start as ``NotImplemented`` on the decorated class. A
    subclass that is still abstract may leave them to its own subclasses.
    """

    def decorate(base_cls):
        for attribute in attributes:
            setattr(base_cls, attribute, NotImplemented)
        own_hook = base_cls.__dict__.get("__init_subclass__")

        def __init_subclass__(cls, **kwargs):
            if own_hook is not None:
                own_hook.__get__(None, cls)(**kwargs)
            else:
                super(base_cls, cls).__init_subclass__(**kwargs)
            missing = [
                attribute
                for attribute in attributes
                if getattr(cls, attribute, NotImplemented) is NotImplemented
            ]
            if missing and not inspect.isabstract(cls):
                names = ", ".join(f'"{attribute}"' for attribute in missing)
                raise NotImplementedError(
                    f"{cls.__name__} does not define the class attribute(s) {names}."
                )

        base_cls.__init_subclass__ = classmethod(__init_subclass__)
        return base_cls

    return decorate


def significant(value: float, digits: int = 17) -> str:
    """Format a float with a fixed number of significant digits."""
    return f"{value:.{digits}g}"
