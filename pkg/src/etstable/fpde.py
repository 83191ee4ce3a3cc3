"""Fractional evolution equation solved mode-by-mode in Fourier space.

The generator acts on Fourier modes as multiplication by its symbol

    Lambda(u) = i <m, u> + exponent of the law at time 1,

so each mode obeys ``dP/dt = Lambda(u) P`` with ``P(u, 0) = 1`` (a point mass
at the origin). :func:`solve` integrates this with classical RK4;
:func:`closed_form` is the exact exponential used as the oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .charfn import EtsParams, TidParams, cf_from_exponent, ets_exponent, tid_exponent
from .density import DensityGrid, GridSpec, invert_values
from .errors import DomainError, NonConvergence, ParameterError, PoleError, StabilityViolation

KINDS = ("tid_psi", "tid_psi0", "ets")
RK4_STABILITY = 2.7


@dataclass(frozen=True, eq=False)
class GeneratorSymbol:
    kind: str
    params: object

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ParameterError(f"unknown symbol kind {self.kind!r}; expected one of {KINDS}")
        if self.kind == "ets":
            if not isinstance(self.params, EtsParams):
                raise ParameterError("ets symbol needs EtsParams")
        else:
            if not isinstance(self.params, TidParams):
                raise ParameterError(f"{self.kind} symbol needs TidParams")
            if self.kind == "tid_psi" and self.params.alpha == 1.0:
                raise PoleError("the TID kernel has a pole at alpha = 1")
            if self.kind == "tid_psi0" and not 0 < self.params.alpha < 1:
                raise DomainError("the alternative kernel needs alpha in (0, 1)")

    @property
    def dim(self) -> int:
        return self.params.dim

    @property
    def drift(self) -> np.ndarray:
        return self.params.mu if self.kind == "ets" else self.params.m

    def to_json(self) -> dict:
        return {"kind": self.kind, "params": self.params.to_json()}


@dataclass(frozen=True, eq=False)
class FourierField:
    grid: GridSpec
    values: np.ndarray
    time: float = 0.0

    @classmethod
    def initial(cls, grid: GridSpec) -> "FourierField":
        return cls(grid, np.ones(grid.n, dtype=complex), 0.0)


def symbol_eval(g: GeneratorSymbol, u):
    """``Lambda(u)`` at a point ``(dim,)`` or array of points ``(..., dim)``."""
    if g.kind == "ets":
        return ets_exponent(g.params, u)
    return tid_exponent(g.params, u, alternative=(g.kind == "tid_psi0"))


def symbol_on_grid(g: GeneratorSymbol, grid: GridSpec) -> np.ndarray:
    if grid.dim != g.dim:
        raise ParameterError("grid dimension does not match the symbol")
    lam = np.asarray(symbol_eval(g, grid.u_points()), dtype=complex).reshape(grid.n)
    if not np.all(np.isfinite(lam)):
        raise NonConvergence("symbol is not finite on the working grid")
    return lam


def stability_bound(symbol_values: np.ndarray) -> float:
    peak = float(np.max(np.abs(symbol_values)))
    return math.inf if peak == 0 else RK4_STABILITY / peak


def _rk4(y: np.ndarray, lam: np.ndarray, dt: float) -> np.ndarray:
    k1 = lam * y
    k2 = lam * (y + 0.5 * dt * k1)
    k3 = lam * (y + 0.5 * dt * k2)
    k4 = lam * (y + dt * k3)
    return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def step_rk4(field: FourierField, g: GeneratorSymbol, dt: float,
             symbol_values: np.ndarray | None = None) -> FourierField:
    """Advance every mode by one RK4 step of ``y' = Lambda(u) y``."""
    lam = symbol_on_grid(g, field.grid) if symbol_values is None else symbol_values
    if not dt > 0:
        raise ParameterError("dt must be positive")
    bound = stability_bound(lam)
    if dt > bound:
        raise StabilityViolation(f"dt = {dt:g} exceeds the RK4 bound {bound:.4g}")
    return FourierField(field.grid, _rk4(field.values, lam, dt), field.time + dt)


def solve(g: GeneratorSymbol, grid: GridSpec, t_end: float, dt: float,
          symbol_values: np.ndarray | None = None) -> FourierField:
    """RK4 solution at ``t_end`` from the point-mass initial condition.

    The step is shrunk to ``t_end / ceil(t_end / dt)`` so the final time is hit exactly.
    """
    if t_end < 0:
        raise ParameterError("t_end must be non-negative")
    field = FourierField.initial(grid)
    if t_end == 0:
        return field
    lam = symbol_on_grid(g, grid) if symbol_values is None else symbol_values
    if not dt > 0:
        raise ParameterError("dt must be positive")
    steps = max(1, math.ceil(t_end / dt - 1e-9))
    h = t_end / steps
    bound = stability_bound(lam)
    if h > bound:
        raise StabilityViolation(f"dt = {h:g} exceeds the RK4 bound {bound:.4g}")
    y = field.values
    for _ in range(steps):
        y = _rk4(y, lam, h)
    return FourierField(grid, y, t_end)


def closed_form(g: GeneratorSymbol, grid: GridSpec, t: float,
                symbol_values: np.ndarray | None = None) -> FourierField:
    """Exact solution ``exp(t Lambda(u))``."""
    lam = symbol_on_grid(g, grid) if symbol_values is None else symbol_values
    return FourierField(grid, np.asarray(cf_from_exponent(t * lam), dtype=complex).reshape(grid.n), t)


def relative_error(field: FourierField, exact: FourierField) -> float:
    """Max over modes of ``|field - exact| / |exact|``, skipping underflowed modes."""
    ref = np.abs(exact.values)
    mask = ref > 0
    return float(np.max(np.abs(field.values[mask] - exact.values[mask]) / ref[mask]))


def auto_dt(symbol_values: np.ndarray, cap: float = 1e-3, safety: float = 0.5) -> float:
    return min(cap, safety * stability_bound(symbol_values))


def density_at_time(g: GeneratorSymbol, grid: GridSpec, t: float, dt: float | None = None,
                    **invert_kwargs) -> DensityGrid:
    """Solve to time ``t`` and invert the resulting field into a density."""
    if not t > 0:
        raise ParameterError("t must be positive")
    lam = symbol_on_grid(g, grid)
    if dt is None:
        dt = auto_dt(lam)
    field = solve(g, grid, t, dt, symbol_values=lam)
    return invert_values(field.values, grid, **invert_kwargs)


def _edge_max_real(g: GeneratorSymbol, dim: int, umax: float, t: float, probes: int = 129) -> float:
    """Largest ``Re(t Lambda)`` on the boundary of the box ``[-umax, umax]^dim``."""
    line = np.linspace(-umax, umax, probes)
    if dim == 1:
        pts = np.array([[-umax], [umax]])
    else:
        edges = []
        for axis in range(dim):
            for sgn in (-1.0, 1.0):
                p = np.zeros((probes, dim))
                p[:, axis] = sgn * umax
                p[:, 1 - axis] = line
                edges.append(p)
        pts = np.concatenate(edges)
    return float(np.max(t * np.real(np.asarray(symbol_eval(g, pts)))))


def grid_for_symbol(g: GeneratorSymbol, n: int, t: float = 1.0, log_floor: float = -19.0,
                    center=None) -> GridSpec:
    """Uniform grid whose frequency boundary sits where ``Re(t Lambda) = log_floor``.

    ``log_floor = -19`` leaves ``|cf| ~ 5.6e-9`` at the boundary, just under
    the aliasing threshold used by the inversion.
    """
    dim = g.dim
    lo, hi = 1e-3, 1e-3
    while _edge_max_real(g, dim, hi, t) > log_floor:
        lo, hi = hi, 2.0 * hi
        if hi > 1e8:
            raise NonConvergence("symbol does not decay to the requested floor")
    for _ in range(80):
        mid = math.sqrt(lo * hi)
        if _edge_max_real(g, dim, mid, t) > log_floor:
            lo = mid
        else:
            hi = mid
    # the positive frequency edge is (n/2 - 1) du = (n/2 - 1) pi / L
    half_width = (n // 2 - 1) * math.pi / hi
    c = t * np.asarray(g.drift) if center is None else np.asarray(center, dtype=float)
    return GridSpec(c, [half_width] * dim, [n] * dim)
