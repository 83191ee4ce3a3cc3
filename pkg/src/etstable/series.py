"""Series solutions of the evolution equation in Fourier space.

Three recurrences build the same series ``sum_k V_k`` with ``V_0 = 1``:

* homotopy perturbation (``"hpm"``): matching powers of the embedding
  parameter gives ``dV_{k+1}/dt = Lambda V_k`` with ``V_{k+1}(0) = 0``;
  each ``V_k`` is carried as a full polynomial in ``t``.
* Adomian decomposition (``"adm"``): ``V_{k+1} = L_t^{-1}[Lambda V_k]``
  with ``L_t^{-1}`` the integral from 0 to t; terms are carried as single
  monomials ``a t^p``.
* variational iteration (``"vim"``): the correction functional with
  multiplier -1 applied to the running approximation ``U_n``; ``U_n`` is
  carried in divided powers ``sum_j a_j t^j / j!`` so that differentiation
  and integration are index shifts, and ``V_{n+1} = U_{n+1} - U_n``.

Time integrals are exact operations on polynomials.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .density import ALIAS_TOL, DensityGrid, GridSpec, _boundary_max, invert_values
from .errors import AliasingSuspected, ParameterError, SeriesOverflow, TruncationTooCoarse
from .fpde import FourierField, GeneratorSymbol, symbol_on_grid

METHODS = ("hpm", "adm", "vim")
MAX_TERMS = 64
VIM_MULTIPLIER = -1.0
HUGE = 1e300


def _hpm_step(carrier, lam, t):
    (poly,) = carrier
    new = np.zeros((poly.shape[0] + 1,) + poly.shape[1:], dtype=complex)
    for j in range(poly.shape[0]):
        new[j + 1] = lam * poly[j] / (j + 1)
    value = new[-1]
    for j in range(new.shape[0] - 2, -1, -1):
        value = value * t + new[j]
    return (new,), value


def _adm_step(carrier, lam, t):
    amp, power = carrier
    amp = lam * amp / (power + 1)
    power += 1
    return (amp, power), amp * t ** power


def _vim_step(carrier, lam, t):
    (coef,) = carrier
    n = coef.shape[0]
    # residual of the equation, r = dU/ds - Lambda U, in divided powers
    shifted = np.zeros_like(coef)
    shifted[:-1] = coef[1:]
    residual = np.concatenate([shifted - lam * coef, np.zeros((1,) + coef.shape[1:], complex)])
    integral = np.zeros_like(residual)
    integral[1:] = residual[:-1]
    correction = VIM_MULTIPLIER * integral
    new = np.concatenate([coef, np.zeros((1,) + coef.shape[1:], complex)]) + correction
    scale = 1.0
    value = np.zeros(coef.shape[1:], dtype=complex)
    for j in range(n + 1):
        value = value + correction[j] * scale
        scale = scale * t / (j + 1)
    return (new,), value


_STEPS = {"hpm": _hpm_step, "adm": _adm_step, "vim": _vim_step}


def _initial_carrier(method, shape):
    one = np.ones((1,) + shape, dtype=complex)
    if method == "adm":
        return (one[0], 0)
    return (one,)


@dataclass(frozen=True, eq=False)
class SeriesState:
    method: str
    grid: GridSpec
    t: float
    symbol_values: np.ndarray
    terms: tuple
    partial_sum: FourierField
    carrier: tuple

    @property
    def order(self) -> int:
        """Index of the last term held."""
        return len(self.terms) - 1


def initial_state(g: GeneratorSymbol, grid: GridSpec, t: float, method: str) -> SeriesState:
    if method not in METHODS:
        raise ParameterError(f"unknown series method {method!r}; expected one of {METHODS}")
    if t < 0:
        raise ParameterError("t must be non-negative")
    lam = symbol_on_grid(g, grid)
    v0 = FourierField(grid, np.ones(grid.n, dtype=complex), t)
    return SeriesState(method, grid, float(t), lam, (v0,), v0, _initial_carrier(method, grid.n))


def _advance(state: SeriesState):
    carrier, value = _STEPS[state.method](state.carrier, state.symbol_values, state.t)
    if not np.all(np.isfinite(value)) or np.max(np.abs(value)) > HUGE:
        raise SeriesOverflow(f"term {len(state.terms)} overflows; |t Lambda| is too large")
    return carrier, FourierField(state.grid, value, state.t)


def next_term(state: SeriesState, g: GeneratorSymbol, t: float) -> FourierField:
    """The term following the last one held by ``state``; ``state`` is unchanged."""
    if t != state.t:
        raise ParameterError("series terms are evaluated at the state's fixed time")
    return _advance(state)[1]


def extend(state: SeriesState) -> SeriesState:
    """New snapshot with one more term appended."""
    if len(state.terms) > MAX_TERMS:
        raise ParameterError(f"series capped at N = {MAX_TERMS}")
    carrier, term = _advance(state)
    total = FourierField(state.grid, state.partial_sum.values + term.values, state.t)
    return replace(state, terms=state.terms + (term,), partial_sum=total, carrier=carrier)


def partial_sum(g: GeneratorSymbol, grid: GridSpec, t: float, n_terms: int,
                method: str = "hpm") -> SeriesState:
    """State holding ``V_0, ..., V_N`` with ``N = n_terms``."""
    if not 0 <= n_terms <= MAX_TERMS:
        raise ParameterError(f"n_terms must lie in [0, {MAX_TERMS}]")
    state = initial_state(g, grid, t, method)
    for _ in range(n_terms):
        state = extend(state)
    return state


def remainder_bound(state: SeriesState) -> np.ndarray:
    """Pointwise bound on ``|exp(z) - sum_{k<=N} z^k / k!|`` with ``z = t Lambda``.

    Integral form of the Taylor remainder:
    ``|z|^(N+1) / (N+1)! * max(1, exp(Re z))``.
    """
    z = state.t * state.symbol_values
    n = state.order
    az = np.abs(z)
    with np.errstate(divide="ignore"):
        log_bound = (n + 1) * np.log(az) - math.lgamma(n + 2) + np.maximum(z.real, 0.0)
    return np.where(az > 0, np.exp(log_bound), 0.0)


def series_density(g: GeneratorSymbol, grid: GridSpec, t: float, n_terms: int,
                   method: str = "hpm", tol: float = 1e-8, **invert_kwargs) -> DensityGrid:
    """Invert the N-term partial sum; rejects truncations coarser than ``tol``."""
    state = partial_sum(g, grid, t, n_terms, method)
    bound = float(np.max(remainder_bound(state)))
    if bound > tol:
        raise TruncationTooCoarse(
            f"remainder bound {bound:.3e} exceeds {tol:g} with N = {n_terms}")
    check = invert_kwargs.pop("check_aliasing", True)
    if check:
        # the limit |exp(t Lambda)| is known exactly; judge the grid on it, not on
        # the truncated sum whose edge values carry the remainder
        edge = _boundary_max(np.exp(t * state.symbol_values.real))
        if edge > ALIAS_TOL:
            raise AliasingSuspected(
                f"|cf| = {edge:.3e} at the frequency-grid boundary exceeds {ALIAS_TOL:g}")
    return invert_values(state.partial_sum.values, grid, check_aliasing=False, **invert_kwargs)


def remainder_table(g: GeneratorSymbol, grid: GridSpec, t: float, n_max: int,
                    method: str = "hpm") -> list[dict]:
    """Per-N maximum remainder bound and observed error against ``exp(t Lambda)``."""
    state = initial_state(g, grid, t, method)
    exact = np.exp(t * state.symbol_values)
    rows = []
    for n in range(n_max + 1):
        if n:
            state = extend(state)
        rows.append({
            "n": n,
            "max_bound": float(np.max(remainder_bound(state))),
            "max_error": float(np.max(np.abs(state.partial_sum.values - exact))),
        })
    return rows
