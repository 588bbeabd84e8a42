"""Monte Carlo oracle for the reinsurance premiums.

Surplus paths of the exponential-claims models are simulated directly from
the definition: the outflow process Y_t = -c t + S_t + sigma B_t is followed
until the discount factor e^{-q t} drops below ``horizon_eps``, the ruin time
tau_x and the later record jumps are located, and the discounted payoff of
each contract is accumulated path by path.

* sigma = 0: exact.  Jump times come from an exponential(lambda) clock and
  Y decreases linearly in between, so every record happens at a jump.
* sigma > 0: Euler grid of step ``dt`` for the Brownian part with the jumps
  inserted at their exact times.  The first record may be a diffusion
  crossing of x (injection 0, base level x); later records are counted only
  at jump instants where Y exceeds its running supremum over the grid, so
  an injection includes the oscillation cost since the previous record.

Every path owns a counter-based Philox stream keyed on (seed, path index), so
results do not depend on how paths are batched or distributed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from .exceptions import ModelError
from .model import ModelSpec
from .premium import ExtremeLoss, PremiumQuery, Proportional


@dataclass(frozen=True)
class McConfig:
    """Monte Carlo settings.

    Paths run until ``exp(-q t) < horizon_eps``, i.e. up to
    ``T = -log(horizon_eps) / q``.
    """

    n_paths: int
    horizon_eps: float = 1e-4
    dt: float = 1e-3
    seed: int = 0

    def __post_init__(self):
        if int(self.n_paths) != self.n_paths or self.n_paths < 1:
            raise ModelError(f"n_paths must be a positive integer, got {self.n_paths}")
        if not 0.0 < self.horizon_eps < 1.0:
            raise ModelError(f"horizon_eps must lie in (0, 1), got {self.horizon_eps}")
        if not (math.isfinite(self.dt) and self.dt > 0.0):
            raise ModelError(f"dt must be positive, got {self.dt}")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise ModelError("seed must be a 64-bit unsigned integer")

    def horizon(self, q: float) -> float:
        if not q > 0.0:
            raise ModelError("the simulation horizon needs q > 0")
        return -math.log(self.horizon_eps) / q


@dataclass(frozen=True)
class PathOutcome:
    """Record times tau^(1) < tau^(2) < ... and the injections paid at them.

    ``injections[0]`` is the deficit at ruin Y_{tau^(1)} - x, and
    ``injections[n]`` = Y_{tau^(n+1)} - Y_{tau^(n)} for n >= 1.
    """

    record_times: np.ndarray = field(default_factory=lambda: np.empty(0))
    injections: np.ndarray = field(default_factory=lambda: np.empty(0))

    @property
    def ruined(self) -> bool:
        return self.record_times.size > 0

    @property
    def ruin_time(self) -> float:
        return float(self.record_times[0]) if self.ruined else math.inf

    @property
    def overshoot(self) -> float:
        """Y_{tau_x} - x, or 0 on survival (and at a diffusion crossing)."""
        return float(self.injections[0]) if self.ruined else 0.0


@dataclass(frozen=True)
class McEstimate:
    """Sample mean with its standard error (nan when n_paths = 1)."""

    mean: float
    stderr: float
    n_paths: int

    @classmethod
    def from_samples(cls, samples) -> "McEstimate":
        samples = np.asarray(samples, dtype=float)
        n = samples.size
        if n == 0:
            raise ValueError("no samples")
        se = float(np.std(samples, ddof=1) / math.sqrt(n)) if n > 1 else math.nan
        return cls(float(np.mean(samples)), se, n)

    def _m2(self):
        if self.n_paths == 1:
            return 0.0
        return self.stderr ** 2 * self.n_paths * (self.n_paths - 1)

    def combine(self, other: "McEstimate") -> "McEstimate":
        """Merge two independent estimates (pairwise mean/variance update)."""
        n = self.n_paths + other.n_paths
        d = other.mean - self.mean
        mean = self.mean + d * other.n_paths / n
        m2 = self._m2() + other._m2() + d * d * self.n_paths * other.n_paths / n
        se = math.sqrt(m2 / (n - 1) / n) if n > 1 else math.nan
        return McEstimate(mean, se, n)

    def scaled(self, a: float) -> "McEstimate":
        return McEstimate(a * self.mean, abs(a) * self.stderr, self.n_paths)

    def z_score(self, value: float) -> float:
        """(mean - value) / stderr."""
        if not self.stderr > 0.0:
            return math.nan
        return (self.mean - value) / self.stderr


def path_rng(seed: int, index: int) -> np.random.Generator:
    """Independent stream for path ``index``: Philox keyed on (seed, index)."""
    key = np.array([int(seed), int(index)], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _check_model(model):
    if not model.exponential_claims:
        raise ModelError("simulation supports the exponential-claims models only")


def _jumps(model, horizon, rng):
    lam = model.lam
    n = int(lam * horizon + 6.0 * math.sqrt(lam * horizon) + 10)
    times = np.cumsum(rng.exponential(1.0 / lam, n))
    while times[-1] <= horizon:
        more = np.cumsum(rng.exponential(1.0 / lam, n)) + times[-1]
        times = np.concatenate([times, more])
    times = times[times <= horizon]
    sizes = rng.exponential(1.0 / model.mu, times.size)
    return times, sizes


def _records_from_levels(times, y, x, is_jump=None):
    """Record times and injections from Y sampled along a path.

    ``y[k]`` is Y at ``times[k]``.  ``is_jump`` marks the samples taken just
    after a jump; None means every sample is one (sigma = 0).
    """
    above = np.flatnonzero(y > x)
    if above.size == 0:
        return PathOutcome()
    k0 = above[0]
    creep = is_jump is not None and not is_jump[k0]
    base = x if creep else y[k0]
    rec_t = [times[k0]]
    inj = [0.0 if creep else y[k0] - x]

    tail = y[k0 + 1:]
    if tail.size:
        prior = np.maximum.accumulate(np.concatenate(([y[k0]], tail[:-1])))
        hit = tail > prior
        if is_jump is not None:
            hit &= is_jump[k0 + 1:]
        idx = np.flatnonzero(hit) + k0 + 1
        if idx.size:
            levels = y[idx]
            inj.extend(np.diff(np.concatenate(([base], levels))))
            rec_t.extend(times[idx])
    return PathOutcome(np.asarray(rec_t, dtype=float), np.asarray(inj, dtype=float))


def simulate_path(model: ModelSpec, x: float, horizon: float, cfg: McConfig,
                  rng: np.random.Generator) -> PathOutcome:
    """One surplus path on [0, horizon]; see the module docstring."""
    _check_model(model)
    if not x > 0.0:
        raise ModelError("x must be positive")
    times, sizes = _jumps(model, horizon, rng)
    if model.sigma == 0.0:
        y = np.cumsum(sizes) - model.c * times
        return _records_from_levels(times, y, x)

    n_grid = int(math.ceil(horizon / cfg.dt))
    grid = np.minimum(np.arange(1, n_grid + 1) * cfg.dt, horizon)
    # each jump contributes a pre-jump (diffusion) sample and a post-jump one
    t_all = np.concatenate([grid, times, times])
    kind = np.concatenate([np.zeros(n_grid, int), np.ones(times.size, int),
                           np.full(times.size, 2)])
    order = np.lexsort((kind, t_all))
    t_all, kind = t_all[order], kind[order]
    is_jump = kind == 2
    steps = np.diff(t_all, prepend=0.0)
    brownian = np.cumsum(np.sqrt(steps) * rng.standard_normal(t_all.size))
    jump_sizes = np.zeros(t_all.size)
    jump_sizes[is_jump] = sizes
    y = -model.c * t_all + np.cumsum(jump_sizes) + model.sigma * brownian
    return _records_from_levels(t_all, y, x, is_jump)


def simulate_paths(model: ModelSpec, x: float, q: float, cfg: McConfig,
                   start: int = 0, stop: Optional[int] = None) -> List[PathOutcome]:
    """Paths ``start .. stop - 1`` (default: all ``cfg.n_paths``)."""
    _check_model(model)
    horizon = cfg.horizon(q)
    stop = cfg.n_paths if stop is None else stop
    return [simulate_path(model, x, horizon, cfg, path_rng(cfg.seed, i))
            for i in range(start, stop)]


def _outcomes(model, x, q, cfg, outcomes):
    if outcomes is None:
        return simulate_paths(model, x, q, cfg)
    return outcomes


def _discounted(out, q, payoff):
    if not out.ruined:
        return 0.0
    return float(np.sum(np.exp(-q * out.record_times) * payoff(out.injections)))


def estimate_premium_mc(model: ModelSpec, query: PremiumQuery, cfg: McConfig,
                        outcomes: Optional[Sequence[PathOutcome]] = None) -> McEstimate:
    """Mean over paths of sum_n e^{-q tau^(n+1)} r(C_n).

    A proportional contract is evaluated as a times the m = 0 extreme-loss
    estimate, which it equals path by path.
    """
    q = query.q
    outs = _outcomes(model, query.x, q, cfg, outcomes)
    contract = query.contract
    if isinstance(contract, Proportional):
        base = PremiumQuery(q, query.x, ExtremeLoss(0.0))
        return estimate_premium_mc(model, base, cfg, outs).scaled(contract.a)
    m = contract.m
    payoff = lambda c: np.where(c >= m, c, 0.0)
    return McEstimate.from_samples([_discounted(o, q, payoff) for o in outs])


def estimate_kappa_mc(model: ModelSpec, q: float, x: float, cfg: McConfig,
                      outcomes: Optional[Sequence[PathOutcome]] = None) -> McEstimate:
    """Mean of e^{-q tau_x} 1{tau_x <= T}."""
    outs = _outcomes(model, x, q, cfg, outcomes)
    return McEstimate.from_samples([math.exp(-q * o.ruin_time) for o in outs])


def estimate_varphi_mc(model: ModelSpec, q: float, x: float, m: float, cfg: McConfig,
                       outcomes: Optional[Sequence[PathOutcome]] = None) -> McEstimate:
    """Mean of e^{-q tau_x} (Y_{tau_x} - x) 1{Y_{tau_x} - x >= m}."""
    outs = _outcomes(model, x, q, cfg, outcomes)
    vals = [math.exp(-q * o.ruin_time) * o.overshoot if o.ruined and o.overshoot >= m
            else 0.0 for o in outs]
    return McEstimate.from_samples(vals)


def estimate_ruin_probability_mc(model: ModelSpec, x: float, q: float, cfg: McConfig,
                                 outcomes: Optional[Sequence[PathOutcome]] = None
                                 ) -> McEstimate:
    """Fraction of paths ruined before the horizon set by ``q``."""
    outs = _outcomes(model, x, q, cfg, outcomes)
    return McEstimate.from_samples([float(o.ruined) for o in outs])
