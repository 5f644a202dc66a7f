"""Common types used in eigenbound."""


from typing import Callable, Union

import numpy as np

Point = np.ndarray
"""A manifold point: periodic coordinates on tori, a unit vector on spheres."""

RadialFunction = Callable[[np.ndarray], np.ndarray]
"""A vectorized function of the radius (or of the ODE abscissa)."""

Real = Union[float, np.ndarray]
