"""Driftless subordinators: Laplace exponents, exact increment samplers, paths,
and first-passage (inverse) simulation.

Six families are supported, identified by their Laplace exponents ``f`` in
``E[exp(-s L(t))] = exp(-t f(s))``:

======================  =================================================
Stable                  ``s^alpha``
MixedStable             ``sum_i c_i s^(alpha_i)``
TemperedStable          ``(s + mu)^alpha - mu^alpha``
MixtureTemperedStable   ``sum_i c_i ((s + mu_i)^(alpha_i) - mu_i^(alpha_i))``
Gamma                   ``p log(1 + s/a)``
InverseGaussian         ``delta (sqrt(2 s + gamma^2) - gamma)``
======================  =================================================

Increments are exact in law: Kanter's representation for one-sided stable
variables, exponential-tilting rejection (with infinitely-divisible chunk
splitting) for tempered stable, sums of independent time-scaled components
for the mixtures, and the native gamma / Wald generators otherwise.  Inverse
subordinators are simulated by first crossing of a fixed-step path, which
carries an O(step) bias.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import DomainError, HorizonOverflow, NonConvergence

__all__ = [
    "RngStream",
    "as_generator",
    "Stable",
    "MixedStable",
    "TemperedStable",
    "MixtureTemperedStable",
    "Gamma",
    "InverseGaussian",
    "SubordinatorSpec",
    "PathSample",
    "laplace_exponent",
    "sample_increment",
    "sample_path",
    "first_crossing",
    "sample_inverse",
    "sample_inverse_many",
    "sample_inverse_at",
]

_DEFAULT_MAX_STEPS = 10_000_000


@dataclass(frozen=True)
class RngStream:
    """Reproducible random source: a seed plus a stream id.

    Streams with the same seed but different ids are statistically
    independent (counter-based Philox keyed by the pair).  ``generator()``
    returns a fresh numpy Generator positioned at the start of the stream.
    """

    seed: int
    stream: int = 0

    def generator(self) -> np.random.Generator:
        return np.random.Generator(np.random.Philox(np.random.SeedSequence((self.seed, self.stream))))


def as_generator(rng: Union[RngStream, np.random.Generator]) -> np.random.Generator:
    if isinstance(rng, RngStream):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    raise DomainError("rng must be an RngStream or a numpy Generator")


def _positive(name: str, value: float) -> None:
    if not (value > 0 and math.isfinite(value)):
        raise DomainError(f"{name} must be positive and finite")


@dataclass(frozen=True)
class Stable:
    """One-sided stable subordinator, exponent ``s^alpha``."""

    alpha: float

    def __post_init__(self) -> None:
        if not (0 < self.alpha < 1):
            raise DomainError("stable index alpha must lie in (0, 1)")


@dataclass(frozen=True)
class MixedStable:
    """Weighted sum of independent stable subordinators, ``sum c_i s^(alpha_i)``."""

    weights: tuple[float, ...]
    alphas: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "weights", tuple(float(c) for c in self.weights))
        object.__setattr__(self, "alphas", tuple(float(a) for a in self.alphas))
        if len(self.weights) != len(self.alphas) or not self.weights:
            raise DomainError("weights and alphas must be nonempty and equally long")
        for c in self.weights:
            _positive("mixture weight", c)
        for a in self.alphas:
            if not (0 < a < 1):
                raise DomainError("stable indices must lie in (0, 1)")


@dataclass(frozen=True)
class TemperedStable:
    """Exponentially tempered stable subordinator, ``(s + mu)^alpha - mu^alpha``."""

    alpha: float
    mu: float

    def __post_init__(self) -> None:
        if not (0 < self.alpha < 1):
            raise DomainError("stable index alpha must lie in (0, 1)")
        if not (self.mu >= 0 and math.isfinite(self.mu)):
            raise DomainError("tempering rate mu must be nonnegative and finite")


@dataclass(frozen=True)
class MixtureTemperedStable:
    """Weighted sum of independent tempered stable subordinators."""

    weights: tuple[float, ...]
    alphas: tuple[float, ...]
    mus: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "weights", tuple(float(c) for c in self.weights))
        object.__setattr__(self, "alphas", tuple(float(a) for a in self.alphas))
        object.__setattr__(self, "mus", tuple(float(m) for m in self.mus))
        if not (len(self.weights) == len(self.alphas) == len(self.mus)) or not self.weights:
            raise DomainError("weights, alphas, and mus must be nonempty and equally long")
        for c in self.weights:
            _positive("mixture weight", c)
        for a in self.alphas:
            if not (0 < a < 1):
                raise DomainError("stable indices must lie in (0, 1)")
        for m in self.mus:
            if not (m >= 0 and math.isfinite(m)):
                raise DomainError("tempering rates must be nonnegative and finite")


@dataclass(frozen=True)
class Gamma:
    """Gamma subordinator, exponent ``p log(1 + s/a)``."""

    p: float
    a: float

    def __post_init__(self) -> None:
        _positive("gamma shape rate p", self.p)
        _positive("gamma scale rate a", self.a)


@dataclass(frozen=True)
class InverseGaussian:
    """Inverse Gaussian subordinator, exponent ``delta (sqrt(2s + gamma^2) - gamma)``."""

    delta: float
    gamma: float

    def __post_init__(self) -> None:
        _positive("delta", self.delta)
        _positive("gamma", self.gamma)


SubordinatorSpec = Union[
    Stable, MixedStable, TemperedStable, MixtureTemperedStable, Gamma, InverseGaussian
]


@dataclass(frozen=True)
class PathSample:
    """A subordinator path tabulated on a uniform grid starting at 0."""

    times: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        times = np.asarray(self.times, dtype=float)
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)
        if times.shape != values.shape or times.ndim != 1 or times.size < 2:
            raise DomainError("a path needs matching 1-d times and values with >= 2 points")
        if values[0] < 0 or np.any(np.diff(values) < 0):
            raise DomainError("path values must be nonnegative and nondecreasing")

    @property
    def columns(self) -> tuple[str, ...]:
        return ("time", "value")

    def rows(self):
        for t, v in zip(self.times, self.values):
            yield (repr(float(t)), repr(float(v)))

    def json_payload(self) -> dict:
        return {"times": self.times.tolist(), "values": self.values.tolist()}


def laplace_exponent(spec: SubordinatorSpec, s):
    """Evaluate the Laplace exponent ``f(s)`` of ``spec`` at ``s >= 0``."""
    s_arr = np.asarray(s, dtype=float)
    if np.any(s_arr < 0):
        raise DomainError("laplace_exponent requires s >= 0")
    if isinstance(spec, Stable):
        out = s_arr**spec.alpha
    elif isinstance(spec, MixedStable):
        out = sum(c * s_arr**a for c, a in zip(spec.weights, spec.alphas))
    elif isinstance(spec, TemperedStable):
        out = (s_arr + spec.mu) ** spec.alpha - spec.mu**spec.alpha
    elif isinstance(spec, MixtureTemperedStable):
        out = sum(
            c * ((s_arr + m) ** a - m**a)
            for c, a, m in zip(spec.weights, spec.alphas, spec.mus)
        )
    elif isinstance(spec, Gamma):
        out = spec.p * np.log1p(s_arr / spec.a)
    elif isinstance(spec, InverseGaussian):
        out = spec.delta * (np.sqrt(2.0 * s_arr + spec.gamma**2) - spec.gamma)
    else:
        raise DomainError(f"unknown subordinator spec {spec!r}")
    return float(out) if np.ndim(s) == 0 else out


def _standard_stable(alpha: float, rng: np.random.Generator, size) -> np.ndarray:
    """Kanter's sampler for the one-sided stable law with transform ``exp(-s^alpha)``."""
    u = math.pi * np.clip(rng.random(size), 1e-12, 1.0 - 1e-13)
    e = np.maximum(rng.standard_exponential(size), 1e-300)
    one = 1.0 - alpha
    log_a = (
        (alpha / one) * np.log(np.sin(alpha * u))
        + np.log(np.sin(one * u))
        - (1.0 / one) * np.log(np.sin(u))
    )
    return np.exp((one / alpha) * (log_a - np.log(e)))


def _tempered_once(
    alpha: float, mu: float, dt: np.ndarray, rng: np.random.Generator
) -> np.ndarray:
    """Rejection draw of a tempered stable increment for each dt (all dt * mu^alpha <= ~0.7)."""
    vals = np.empty(dt.shape)
    todo = np.ones(dt.shape, dtype=bool)
    for _ in range(10_000):
        idx = np.flatnonzero(todo)
        if idx.size == 0:
            return vals
        prop = dt[idx] ** (1.0 / alpha) * _standard_stable(alpha, rng, idx.size)
        keep = rng.random(idx.size) < np.exp(-mu * prop)
        vals[idx[keep]] = prop[keep]
        todo[idx[keep]] = False
    raise NonConvergence("tempered stable rejection sampler failed to accept")


def _tempered_increment(
    alpha: float, mu: float, dt: np.ndarray, rng: np.random.Generator
) -> np.ndarray:
    if mu == 0.0:
        return dt ** (1.0 / alpha) * _standard_stable(alpha, rng, dt.shape)
    # split dt into chunks keeping the acceptance rate exp(-dt mu^alpha) >= e^-0.7;
    # increments are infinitely divisible so the chunk sum has the exact law
    chunks = np.maximum(1, np.ceil(dt * mu**alpha / 0.7)).astype(np.int64)
    out = np.zeros_like(dt)
    for r in range(int(chunks.max())):
        live = chunks > r
        out[live] += _tempered_once(alpha, mu, dt[live] / chunks[live], rng)
    return out


def sample_increment(spec: SubordinatorSpec, dt, rng, size=None):
    """Draw ``L(t + dt) - L(t)`` exactly in law.

    ``dt`` may be a positive scalar (with optional ``size`` for i.i.d. draws)
    or an array of per-draw time steps.  Returns a float for scalar input
    without ``size``, otherwise an ndarray.
    """
    gen = as_generator(rng)
    dt_in = np.asarray(dt, dtype=float)
    if np.any(dt_in <= 0):
        raise DomainError("dt must be positive")
    scalar = dt_in.ndim == 0 and size is None
    if size is not None:
        if dt_in.ndim != 0:
            raise DomainError("size can only be combined with scalar dt")
        dt_arr = np.full(int(size), float(dt_in))
    else:
        dt_arr = np.atleast_1d(dt_in)

    if isinstance(spec, Stable):
        out = dt_arr ** (1.0 / spec.alpha) * _standard_stable(spec.alpha, gen, dt_arr.shape)
    elif isinstance(spec, MixedStable):
        out = np.zeros_like(dt_arr)
        for c, a in zip(spec.weights, spec.alphas):
            out += (c * dt_arr) ** (1.0 / a) * _standard_stable(a, gen, dt_arr.shape)
    elif isinstance(spec, TemperedStable):
        out = _tempered_increment(spec.alpha, spec.mu, dt_arr, gen)
    elif isinstance(spec, MixtureTemperedStable):
        out = np.zeros_like(dt_arr)
        for c, a, m in zip(spec.weights, spec.alphas, spec.mus):
            out += _tempered_increment(a, m, c * dt_arr, gen)
    elif isinstance(spec, Gamma):
        out = gen.gamma(shape=spec.p * dt_arr, scale=1.0 / spec.a)
    elif isinstance(spec, InverseGaussian):
        out = gen.wald(spec.delta * dt_arr / spec.gamma, (spec.delta * dt_arr) ** 2)
    else:
        raise DomainError(f"unknown subordinator spec {spec!r}")
    return float(out[0]) if scalar else out


def sample_path(spec: SubordinatorSpec, horizon: float, step: float, rng) -> PathSample:
    """Simulate a path on the uniform grid ``0, step, .., ceil(horizon/step)*step``."""
    if not (horizon > 0):
        raise DomainError("horizon must be positive")
    if not (0 < step <= horizon):
        raise DomainError("step must satisfy 0 < step <= horizon")
    gen = as_generator(rng)
    m = int(math.ceil(horizon / step - 1e-12))
    increments = sample_increment(spec, step, gen, size=m)
    values = np.concatenate([[0.0], np.cumsum(increments)])
    times = step * np.arange(m + 1)
    return PathSample(times, values)


def first_crossing(path: PathSample, level: float) -> float:
    """First grid time ``u`` with ``path(u) > level``; HorizonOverflow if never."""
    idx = int(np.searchsorted(path.values, level, side="right"))
    if idx >= path.values.size:
        raise HorizonOverflow(f"path never exceeds level {level:g} on its grid")
    return float(path.times[idx])


def sample_inverse(
    spec: SubordinatorSpec,
    t: float,
    rng,
    step: float | None = None,
    max_steps: int = _DEFAULT_MAX_STEPS,
) -> float:
    """One draw of the inverse subordinator ``H(t) = inf{u : L(u) > t}``.

    Simulated as the first fixed-step grid time whose path value exceeds
    ``t``; the result overshoots by O(step) on average.  ``step`` defaults to
    ``1e-3 * t``.
    """
    if not (t > 0):
        raise DomainError("t must be positive")
    gen = as_generator(rng)
    h = 1e-3 * t if step is None else float(step)
    if not (h > 0):
        raise DomainError("step must be positive")
    block = 4096
    done_steps = 0
    level = 0.0
    while done_steps < max_steps:
        inc = sample_increment(spec, h, gen, size=block)
        cum = level + np.cumsum(inc)
        idx = int(np.searchsorted(cum, t, side="right"))
        if idx < block:
            return (done_steps + idx + 1) * h
        level = float(cum[-1])
        done_steps += block
    raise HorizonOverflow(f"no crossing of {t:g} within {max_steps} steps of size {h:g}")


def sample_inverse_many(
    spec: SubordinatorSpec,
    t: float,
    n: int,
    rng,
    step: float | None = None,
    max_steps: int = _DEFAULT_MAX_STEPS,
) -> np.ndarray:
    """Vectorized :func:`sample_inverse`: ``n`` independent draws of ``H(t)``."""
    out = sample_inverse_at(spec, [t], n, rng, step=step, max_steps=max_steps)
    return out[:, 0]


def sample_inverse_at(
    spec: SubordinatorSpec,
    times,
    n: int,
    rng,
    step: float | None = None,
    max_steps: int = _DEFAULT_MAX_STEPS,
) -> np.ndarray:
    """Draw ``n`` paths of the inverse subordinator observed at several times.

    Returns an (n, len(times)) matrix ``H[i, j] = H_i(times[j])`` where each
    row is read off one underlying subordinator path, so the clock is shared
    across observation times exactly as in the continuous object.
    """
    grid = np.asarray(times, dtype=float)
    if grid.ndim != 1 or grid.size == 0 or np.any(grid <= 0) or np.any(np.diff(grid) <= 0):
        raise DomainError("times must be a strictly increasing positive vector")
    if n < 1:
        raise DomainError("need n >= 1 paths")
    gen = as_generator(rng)
    h = 1e-3 * float(grid[-1]) if step is None else float(step)
    if not (h > 0):
        raise DomainError("step must be positive")

    level = np.zeros(n)
    u = np.zeros(n)
    steps = np.zeros(n, dtype=np.int64)
    out = np.empty((n, grid.size))
    for j, tg in enumerate(grid):
        active = np.flatnonzero(level <= tg)
        while active.size:
            level[active] += sample_increment(spec, h, gen, size=active.size)
            u[active] += h
            steps[active] += 1
            if steps[active[0]] > max_steps:
                raise HorizonOverflow(
                    f"no crossing of {tg:g} within {max_steps} steps of size {h:g}"
                )
            active = active[level[active] <= tg]
        out[:, j] = u
    return out
