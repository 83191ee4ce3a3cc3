"""Random variate generation.

Positive stable variates come from Kanter's representation; the tempered
stable subordinator is obtained from them by exponential-tilting rejection;
elliptical tempered stable vectors are Gaussian vectors mixed by the
subordinator, ``X = mu + sqrt(T) L Z`` with ``L = chol(Sigma)``.

All generators draw from :class:`RngState`, a Philox counter-based stream
keyed by ``(seed, stream)``, so output is reproducible across platforms.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .charfn import EtsParams, SubordinatorParams
from .dispersion import check_lower_triangular, cholesky
from .errors import BudgetExceeded, DomainError, ParameterError

MAX_EXPECTED_TRIALS = 1.0e4
CHUNK = 1 << 20


class RngState:
    """Philox stream identified by a 64-bit seed and a 64-bit stream number.

    One instance must not be shared between threads; use :meth:`spawn` to
    derive independent streams.
    """

    def __init__(self, seed: int, stream: int = 0):
        if not 0 <= seed < 2 ** 64 or not 0 <= stream < 2 ** 64:
            raise ParameterError("seed and stream must be unsigned 64-bit integers")
        self.seed = int(seed)
        self.stream = int(stream)
        key = np.array([self.seed, self.stream], dtype=np.uint64)
        self.generator = np.random.Generator(np.random.Philox(key=key))

    def spawn(self, index: int) -> "RngState":
        h = hashlib.blake2b(f"{self.stream}:{index}".encode(), digest_size=8).digest()
        return RngState(self.seed, int.from_bytes(h, "little"))

    def __repr__(self):
        return f"RngState(seed={self.seed}, stream={self.stream})"


def params_digest(obj) -> str:
    """SHA-256 of the canonical JSON form of a parameter object."""
    if hasattr(obj, "to_json"):
        obj = obj.to_json()
    text = json.dumps(obj, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode()).hexdigest()


@dataclass(frozen=True, eq=False)
class SampleBatch:
    values: np.ndarray
    params_digest: str = ""
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.ndim == 1:
            v = v[:, None]
        if v.ndim != 2 or v.shape[0] < 1:
            raise ParameterError("a batch needs at least one row")
        if not np.all(np.isfinite(v)):
            raise ParameterError("batch contains non-finite values")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def count(self) -> int:
        return self.values.shape[0]

    @property
    def dim(self) -> int:
        return self.values.shape[1]


def _check_count(count: int) -> int:
    count = int(count)
    if count < 1:
        raise ParameterError("count must be at least 1")
    return count


def _kanter(gen: np.random.Generator, index: float, n: int) -> np.ndarray:
    u = math.pi * gen.random(n)
    e = gen.standard_exponential(n)
    # Zolotarev's function A(u); U = 0 has probability zero under Generator.random
    a = (np.sin(index * u) ** index * np.sin((1.0 - index) * u) ** (1.0 - index)
         / np.sin(u)) ** (1.0 / (1.0 - index))
    return (a / e) ** ((1.0 - index) / index)


def sample_positive_stable(rng: RngState, index: float, count: int) -> np.ndarray:
    """Positive stable variates with ``E exp(-s S) = exp(-s**index)``."""
    if not 0 < index < 1:
        raise DomainError(f"stable index must lie in (0, 1), got {index}")
    count = _check_count(count)
    out = np.empty(count)
    for start in range(0, count, CHUNK):
        stop = min(count, start + CHUNK)
        out[start:stop] = _kanter(rng.generator, index, stop - start)
    return out


def subordinator_acceptance_rate(p: SubordinatorParams) -> float:
    """Acceptance probability ``exp(-2 theta / alpha)`` of the tilting sampler."""
    return math.exp(-2.0 * p.theta / p.alpha)


def sample_tempered_subordinator(rng: RngState, p: SubordinatorParams, count: int,
                                 max_expected_trials: float = MAX_EXPECTED_TRIALS) -> np.ndarray:
    """Tempered stable subordinator variates by exponential tilting.

    Draws ``S`` positive stable with index ``alpha / 2`` and Laplace exponent
    ``(2 theta^(1 - alpha/2) / alpha) s^(alpha/2)`` and keeps it with
    probability ``exp(-theta S)``.
    """
    count = _check_count(count)
    rate = subordinator_acceptance_rate(p)
    if 1.0 / rate > max_expected_trials:
        raise BudgetExceeded(
            f"acceptance rate {rate:.3e} needs {1 / rate:.3e} trials per sample "
            f"(limit {max_expected_trials:.3e})")
    index = 0.5 * p.alpha
    scale = (2.0 * p.theta ** (1.0 - index) / p.alpha) ** (1.0 / index)
    gen = rng.generator
    out = np.empty(count)
    filled = 0
    while filled < count:
        need = count - filled
        n = min(CHUNK, int(need / rate * 1.1) + 16)
        s = scale * _kanter(gen, index, n)
        keep = s[gen.standard_exponential(n) > p.theta * s]
        take = min(need, keep.size)
        out[filled:filled + take] = keep[:take]
        filled += take
    return out


def sample_ets(rng: RngState, p: EtsParams, count: int,
               max_expected_trials: float = MAX_EXPECTED_TRIALS) -> SampleBatch:
    """Elliptical tempered stable vectors ``mu + sqrt(T) chol(Sigma) Z``."""
    count = _check_count(count)
    sub = SubordinatorParams(p.alpha, p.lam)
    t = sample_tempered_subordinator(rng, sub, count, max_expected_trials)
    z = rng.generator.standard_normal((count, p.dim))
    x = p.mu + np.sqrt(t)[:, None] * (z @ cholesky(p.sigma).T)
    return SampleBatch(x, params_digest(p),
                       {"acceptance_rate": subordinator_acceptance_rate(sub)})


def transform_samples(batch: SampleBatch, delta) -> SampleBatch:
    """Apply ``x -> delta @ x`` to every row."""
    delta = check_lower_triangular(delta)
    if delta.shape[0] != batch.dim:
        raise ParameterError("transform dimension does not match the batch")
    digest = hashlib.sha256((batch.params_digest + delta.tobytes().hex()).encode()).hexdigest()
    return SampleBatch(batch.values @ delta.T, digest, dict(batch.meta))


def empirical_cf(values, u) -> np.ndarray:
    """Sample mean of ``exp(i <u, x>)`` at each probe row of ``u``."""
    values = np.asarray(values, dtype=float)
    if values.ndim == 1:
        values = values[:, None]
    u = np.atleast_2d(np.asarray(u, dtype=float))
    if u.shape[-1] != values.shape[1]:
        u = u.reshape(-1, values.shape[1])
    out = np.empty(u.shape[0], dtype=complex)
    for i, ui in enumerate(u):
        phase = values @ ui
        out[i] = complex(np.mean(np.cos(phase)), np.mean(np.sin(phase)))
    return out
