"""
Width of a grid.

Products of chains have the Sperner property, so the width is the largest
coefficient of the rank generating function prod_i (1 + x + ... + x^(k_i - 1)).
A Dilworth matching on the comparability graph cross-checks it.
"""
import math
from dataclasses import dataclass
from typing import List

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from src.core.config import CONF
from src.core.errors import InvariantViolation, PrecondError
from src.grids.grid_core import GridShape
from src.utils.logger import get_logger

logger = get_logger(__name__)


def rank_profile(shape: GridShape) -> List[int]:
    """Number of points at each rank sum(x_i - 1), exact integers."""
    coeffs = np.array([1], dtype=object)
    for k in shape.sides:
        coeffs = np.convolve(coeffs, np.ones(k, dtype=object))
    return [int(c) for c in coeffs]


def grid_width_dilworth(shape: GridShape) -> int:
    """Minimum chain cover via maximum bipartite matching on the strict order."""
    pts = shape.coordinates
    le = np.ones((shape.size, shape.size), dtype=bool)
    for axis in range(shape.n):
        col = pts[:, axis]
        le &= col[:, None] <= col[None, :]
    np.fill_diagonal(le, False)
    match = maximum_bipartite_matching(csr_matrix(le), perm_type="column")
    return shape.size - int((match >= 0).sum())


def grid_width(shape: GridShape) -> int:
    w = max(rank_profile(shape))
    if shape.size <= CONF.dilworth_check_max_points:
        matched = grid_width_dilworth(shape)
        if matched != w:
            raise InvariantViolation(f"width of {shape.sides}: profile {w}, matching {matched}")
    logger.debug("grid_width %s = %d", shape.sides, w)
    return w


@dataclass(frozen=True)
class WidthEstimate:
    exact: int
    estimate: float
    ratio: float


def width_estimate(shape: GridShape) -> WidthEstimate:
    """The Theta(k^(n-1)/sqrt(n)) estimate next to the exact width."""
    k = shape.side
    if k < 2:
        raise PrecondError("width estimate needs k >= 2")
    n = shape.n
    estimate = k ** (n - 1) / math.sqrt(n)
    exact = grid_width(shape)
    return WidthEstimate(exact, estimate, exact / estimate)
