"""Finite atomic spectral measures and tempering families.

A :class:`SpectralMeasure` is a finite sum of weighted point masses on
R^n minus the origin; a :class:`TemperingFamily` holds, for finitely many
directions on the unit sphere, the radial point masses that define the
tempering function. Both are immutable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError, ParameterError
from .specfun import upper_incomplete_gamma

MERGE_TOL = 1e-12
UNIT_TOL = 1e-12
RENORM_TOL = 1e-9


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def _merge(locations: np.ndarray, weights: np.ndarray, tol: float = MERGE_TOL):
    """Merge atoms whose locations lie within ``tol`` of each other."""
    locs: list[np.ndarray] = []
    ws: list[float] = []
    for x, w in zip(locations, weights):
        for i, y in enumerate(locs):
            if np.linalg.norm(x - y) <= tol:
                ws[i] += w
                break
        else:
            locs.append(x.copy())
            ws.append(float(w))
    return np.array(locs).reshape(-1, locations.shape[1]), np.array(ws)


@dataclass(frozen=True)
class SpectralMeasure:
    """Finite atomic measure ``sum_j w_j delta_{x_j}`` on R^dim \\ {0}.

    An empty atom array of shape ``(0, dim)`` is the zero measure.
    """

    locations: np.ndarray
    weights: np.ndarray

    def __init__(self, locations, weights):
        locs = np.atleast_2d(np.asarray(locations, dtype=float))
        w = np.asarray(weights, dtype=float).reshape(-1)
        if locs.ndim != 2 or locs.shape[0] != w.shape[0] or w.ndim != 1:
            raise ParameterError("locations must be (k, dim) and weights (k,)")
        if not np.all(np.isfinite(locs)):
            raise ParameterError("atom locations must be finite")
        if not np.all(np.isfinite(w)) or np.any(w <= 0):
            raise ParameterError("atom weights must be finite and strictly positive")
        if np.any(np.linalg.norm(locs, axis=1) == 0):
            raise ParameterError("spectral measure must not charge the origin")
        object.__setattr__(self, "locations", _frozen(locs))
        object.__setattr__(self, "weights", _frozen(w))

    @property
    def dim(self) -> int:
        return self.locations.shape[1]

    def __len__(self) -> int:
        return self.weights.shape[0]

    @property
    def total_mass(self) -> float:
        return float(math.fsum(self.weights))

    def moment_condition(self, alpha: float) -> float:
        """``sum_j w_j min(|x_j|^2, |x_j|^alpha)``; finite for a valid measure."""
        r = np.linalg.norm(self.locations, axis=1)
        val = float(np.sum(self.weights * np.minimum(r ** 2, r ** alpha)))
        if not math.isfinite(val):
            raise ParameterError("integrability condition violated")
        return val

    def is_on_sphere(self, tol: float = UNIT_TOL) -> bool:
        return bool(np.all(np.abs(np.linalg.norm(self.locations, axis=1) - 1.0) <= tol))

    def atom_set(self, decimals: int = 12) -> set:
        """Rounded ``(location, weight)`` tuples, for order-free comparison."""
        return {
            (tuple(np.round(x, decimals) + 0.0), round(float(w), decimals))
            for x, w in zip(self.locations, self.weights)
        }

    def scaled(self, c: float) -> "SpectralMeasure":
        return SpectralMeasure(self.locations, c * self.weights)

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "atoms": [{"x": x.tolist(), "w": float(w)} for x, w in zip(self.locations, self.weights)],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "SpectralMeasure":
        dim = int(obj["dim"])
        atoms = obj["atoms"]
        locs = np.array([a["x"] for a in atoms], dtype=float).reshape(-1, dim)
        return cls(locs, [a["w"] for a in atoms])


@dataclass(frozen=True)
class TemperingFamily:
    """Radial point masses ``Q(.|u)`` attached to finitely many directions.

    The mass of the sphere measure at each direction is folded into the
    radial masses, so ``entries[i] = (u_i, [(s, sigma({u_i}) * Q({s}|u_i)), ...])``.
    """

    directions: np.ndarray
    radial: tuple

    def __init__(self, entries: Iterable[tuple[Sequence[float], Sequence[tuple[float, float]]]]):
        dirs = []
        radial = []
        for u, atoms in entries:
            u = np.asarray(u, dtype=float)
            n = np.linalg.norm(u)
            if abs(n - 1.0) > RENORM_TOL:
                raise ParameterError(f"direction {u.tolist()} is not a unit vector (norm {n})")
            dirs.append(u / n)
            pairs = np.array([(float(s), float(m)) for s, m in atoms]).reshape(-1, 2)
            if pairs.shape[0] == 0 or np.any(pairs <= 0) or not np.all(np.isfinite(pairs)):
                raise ParameterError("radial atoms need positive finite s and mass")
            radial.append(_frozen(pairs))
        if not dirs:
            raise ParameterError("tempering family is empty")
        if len({d.shape for d in dirs}) != 1:
            raise ParameterError("directions must share a dimension")
        dirs = np.array(dirs)
        object.__setattr__(self, "directions", _frozen(dirs))
        object.__setattr__(self, "radial", tuple(radial))

    @property
    def dim(self) -> int:
        return self.directions.shape[1]

    def __len__(self) -> int:
        return self.directions.shape[0]

    def _atoms(self, direction_index: int) -> np.ndarray:
        if not 0 <= direction_index < len(self):
            raise IndexError(f"direction index {direction_index} out of range")
        return self.radial[direction_index]

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "entries": [
                {"u": u.tolist(), "radial": [{"s": s, "m": m} for s, m in atoms.tolist()]}
                for u, atoms in zip(self.directions, self.radial)
            ],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "TemperingFamily":
        return cls((e["u"], [(a["s"], a["m"]) for a in e["radial"]]) for e in obj["entries"])


def tempering_q_exp(fam: TemperingFamily, r: float, direction_index: int) -> float:
    """Exponential-kernel tempering function ``sum_j m_j exp(-r s_j)``."""
    atoms = fam._atoms(direction_index)
    if not r > 0:
        raise DomainError("r must be positive")
    return float(np.sum(atoms[:, 1] * np.exp(-r * atoms[:, 0])))


def tempering_q_gauss(fam: TemperingFamily, r: float, direction_index: int) -> float:
    """Gaussian-kernel tempering function ``sum_j m_j exp(-r^2 s_j^2)``."""
    atoms = fam._atoms(direction_index)
    if not r > 0:
        raise DomainError("r must be positive")
    return float(np.sum(atoms[:, 1] * np.exp(-(r * atoms[:, 0]) ** 2)))


def build_r_from_q(fam: TemperingFamily, alpha: float) -> SpectralMeasure:
    """Spectral measure obtained by inverting Q through the unit sphere.

    Each Q-atom at ``s u`` with mass ``m`` becomes an R-atom at ``u / s``
    with weight ``s**alpha * m``; coincident locations are merged.
    """
    if not 0 < alpha < 2:
        raise DomainError("alpha must lie in (0, 2)")
    locs, ws = [], []
    for u, atoms in zip(fam.directions, fam.radial):
        for s, m in atoms:
            locs.append(u / s)
            ws.append(s ** alpha * m)
    locs, ws = _merge(np.array(locs), np.array(ws))
    return SpectralMeasure(locs, ws)


def symmetrize(r: SpectralMeasure) -> SpectralMeasure:
    """Return ``(R(dx) + R(-dx)) / 2``."""
    locs = np.concatenate([r.locations, -r.locations])
    ws = np.concatenate([r.weights, r.weights]) / 2.0
    locs, ws = _merge(locs, ws)
    return SpectralMeasure(locs, ws)


def levy_tail_mass(r: SpectralMeasure, alpha: float, atom_index: int, r0: float) -> float:
    """Levy-measure mass of the ray ``{t x_j : t > r0}``.

    Equals ``w_j * Gamma(-alpha, r0)``.
    """
    if not 0 <= atom_index < len(r):
        raise IndexError(f"atom index {atom_index} out of range")
    if not r0 > 0:
        raise DomainError("r0 must be positive")
    if not 0 < alpha < 2:
        raise DomainError("alpha must lie in (0, 2)")
    return float(r.weights[atom_index]) * upper_incomplete_gamma(-alpha, r0)
