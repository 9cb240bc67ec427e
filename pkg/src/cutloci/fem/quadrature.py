"""Symmetric quadrature rules on the reference triangle {ξ, η ≥ 0, ξ + η ≤ 1}."""

from typing import NamedTuple

import numpy as np

from cutloci.core.errors import FunctionSpaceError


class QuadratureRule(NamedTuple):
    """Points in reference coordinates (n, 2) and weights summing to 1/2."""

    points: np.ndarray
    weights: np.ndarray
    degree: int

    @property
    def size(self) -> int:
        return len(self.weights)


def _orbit(a: float) -> list[tuple[float, float, float]]:
    """The three barycentric permutations of (1 − 2a, a, a)."""
    b = 1.0 - 2.0 * a
    return [(b, a, a), (a, b, a), (a, a, b)]


def _from_barycentric(bary: list[tuple[float, float, float]], weights: list[float], degree: int) -> QuadratureRule:
    bary_arr = np.asarray(bary, dtype=np.float64)
    w = 0.5 * np.asarray(weights, dtype=np.float64)
    return QuadratureRule(bary_arr[:, 1:3].copy(), w, degree)


# Strang–Fix / Dunavant symmetric rules (weights normalized to sum 1).
_RULES: dict[int, QuadratureRule] = {
    1: _from_barycentric([(1 / 3, 1 / 3, 1 / 3)], [1.0], 1),
    3: _from_barycentric(_orbit(1 / 6), [1 / 3] * 3, 2),
    6: _from_barycentric(
        _orbit(0.445948490915965) + _orbit(0.091576213509771),
        [0.223381589678011] * 3 + [0.109951743655322] * 3,
        4,
    ),
    7: _from_barycentric(
        [(1 / 3, 1 / 3, 1 / 3)] + _orbit(0.470142064105115) + _orbit(0.101286507323456),
        [0.225] + [0.132394152788506] * 3 + [0.125939180544827] * 3,
        5,
    ),
}

_BY_DEGREE = {1: 1, 2: 3, 3: 6, 4: 6, 5: 7}


def rule_with_points(n_points: int) -> QuadratureRule:
    """Rule with exactly ``n_points`` points (1, 3, 6 or 7)."""
    try:
        return _RULES[n_points]
    except KeyError:
        raise FunctionSpaceError(
            f"no symmetric triangle rule with {n_points} points; choose one of {sorted(_RULES)}"
        )


def rule_of_degree(degree: int) -> QuadratureRule:
    """Smallest tabulated rule exact for polynomials of total degree ``degree``."""
    if degree not in _BY_DEGREE:
        raise FunctionSpaceError(f"no tabulated triangle rule of degree {degree} (1..5 available)")
    return _RULES[_BY_DEGREE[degree]]
