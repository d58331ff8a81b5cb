"""Stability classification of discrete linear inclusions.

Three graded verdicts: absolute (from certified joint-spectral-radius
bounds), periodic (from periodic products up to a period cap), and Markov
(Monte Carlo Lyapunov-exponent evidence under a full Markov chain, with
absorption detection for products that vanish identically).  Markov
verdicts are evidence, never certificates: the underlying property is an
almost-everywhere statement.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from . import bounds as jsr_bounds
from .errors import InputError
from .matrices import MatrixSet

__all__ = [
    "MarkovChainSpec",
    "MarkovEstimate",
    "markov_lyapunov",
    "StabilityReport",
    "classify",
]

_ABSORPTION_FLOOR = math.log(1e-300)


@dataclass(frozen=True)
class MarkovChainSpec:
    """Row-stochastic transition matrix with an initial distribution."""

    transition: np.ndarray
    initial: np.ndarray
    seed: int = 0

    def __post_init__(self):
        p = np.asarray(self.transition, dtype=np.float64)
        if p.ndim != 2 or p.shape[0] != p.shape[1]:
            raise InputError("transition matrix must be square")
        if np.any(p < 0) or np.max(np.abs(p.sum(axis=1) - 1.0)) > 1e-12:
            raise InputError("transition rows must be nonnegative and sum to 1")
        pi = np.asarray(self.initial, dtype=np.float64)
        if pi.shape != (p.shape[0],) or np.any(pi < 0) or abs(pi.sum() - 1.0) > 1e-12:
            raise InputError("initial distribution must match and sum to 1")
        object.__setattr__(self, "transition", p)
        object.__setattr__(self, "initial", pi)

    @property
    def states(self) -> int:
        return self.transition.shape[0]

    @property
    def full(self) -> bool:
        return bool(np.all(self.transition > 0.0))

    @classmethod
    def uniform(cls, states: int, seed: int = 0) -> "MarkovChainSpec":
        p = np.full((states, states), 1.0 / states)
        return cls(transition=p, initial=np.full(states, 1.0 / states), seed=seed)

    @classmethod
    def from_json(cls, doc: dict) -> "MarkovChainSpec":
        return cls(
            transition=np.asarray(doc["transition"], dtype=np.float64),
            initial=np.asarray(doc["initial"], dtype=np.float64),
            seed=int(doc.get("seed", 0)),
        )

    def to_json(self) -> dict:
        return {
            "transition": self.transition.tolist(),
            "initial": self.initial.tolist(),
            "seed": self.seed,
        }


@dataclass(frozen=True)
class MarkovEstimate:
    """Monte Carlo estimate of the top Lyapunov exponent of the cocycle."""

    lambda_hat: float  # nan when every trial was absorbed
    stderr: float
    horizon: int
    trials: int
    seed: int
    absorbed_count: int
    absorption_steps: tuple  # one entry per absorbed trial

    @property
    def absorbed_fraction(self) -> float:
        return self.absorbed_count / self.trials

    def absorbed_by(self, step: int) -> float:
        """Empirical probability that a trial was absorbed at or before step."""
        return sum(1 for s in self.absorption_steps if s <= step) / self.trials


def _simulate_symbols(chain: MarkovChainSpec, horizon: int, trial: int):
    """Deterministic per-trial symbol path via a counter-based generator."""
    seq = np.random.SeedSequence(entropy=chain.seed, spawn_key=(trial,))
    rng = np.random.Generator(np.random.Philox(seq))
    symbols = np.empty(horizon, dtype=np.int64)
    state = int(rng.choice(chain.states, p=chain.initial))
    symbols[0] = state + 1
    for k in range(1, horizon):
        state = int(rng.choice(chain.states, p=chain.transition[state]))
        symbols[k] = state + 1
    return symbols


def markov_lyapunov(
    ms: MatrixSet,
    chain: MarkovChainSpec,
    horizon: int = 200,
    trials: int = 64,
    threads: int = 1,
) -> MarkovEstimate:
    """Across-trial estimate of lim (1/n) log ||L(x, n)|| under the chain.

    Trials are independent with per-trial derived seeds, so the result does
    not depend on the number of worker threads.  A trial whose product
    norm reaches exact zero (or underflows below 1e-300 in true value)
    counts as absorbed and contributes absorption statistics instead of a
    rate sample.
    """
    if chain.states != len(ms):
        raise InputError("chain state count must match the matrix set")
    if not chain.full:
        raise InputError("the Markov chain must be full (all transitions positive)")
    if horizon < 1 or trials < 1:
        raise InputError("horizon and trials must be >= 1")
    stack = np.ascontiguousarray(ms.stack())

    def run(trial: int):
        symbols = _simulate_symbols(chain, horizon, trial)
        log_norm, absorbed = _kernels.product_log_norm(
            stack, symbols, _ABSORPTION_FLOOR
        )
        return log_norm, absorbed

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run, range(trials)))
    else:
        results = [run(t) for t in range(trials)]

    rates = [r[0] / horizon for r in results if r[1] < 0]
    steps = tuple(sorted(r[1] for r in results if r[1] >= 0))
    if rates:
        lam = float(np.mean(rates))
        stderr = (
            float(np.std(rates, ddof=1) / math.sqrt(len(rates)))
            if len(rates) > 1
            else math.inf
        )
    else:
        lam = math.nan
        stderr = math.nan
    return MarkovEstimate(
        lambda_hat=lam,
        stderr=stderr,
        horizon=horizon,
        trials=trials,
        seed=chain.seed,
        absorbed_count=len(steps),
        absorption_steps=steps,
    )


@dataclass(frozen=True)
class StabilityReport:
    """Graded verdicts for the three stability notions."""

    absolute: str  # Stable | NotStable | Unknown
    periodic: str  # StableUpTo | CounterexampleWord | Unknown
    markov: str  # StableEvidence | ZeroAbsorption | NotStable | Unknown
    jsr: jsr_bounds.JsrBounds
    max_period: int
    periodic_witness: tuple = None
    periodic_value: float = None
    markov_estimate: MarkovEstimate = None
    config: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {
            "absolute": self.absolute,
            "periodic": self.periodic,
            "markov": self.markov,
            "jsr": {
                "lower": self.jsr.lower,
                "upper": self.jsr.upper,
                "lower_witness": list(self.jsr.lower_witness or ()),
                "upper_depth": self.jsr.upper_depth,
                "converged": self.jsr.converged,
            },
            "max_period": self.max_period,
            "periodic_witness": list(self.periodic_witness or ()),
            "periodic_value": self.periodic_value,
            "config": self.config,
        }
        if self.markov_estimate is not None:
            me = self.markov_estimate
            out["markov_estimate"] = {
                "lambda_hat": me.lambda_hat,
                "stderr": me.stderr,
                "horizon": me.horizon,
                "trials": me.trials,
                "seed": me.seed,
                "absorbed_count": me.absorbed_count,
                "mean_absorption_step": (
                    float(np.mean(me.absorption_steps))
                    if me.absorption_steps
                    else None
                ),
            }
        return out


def classify(
    ms: MatrixSet,
    max_period: int = 8,
    depth: int = 12,
    chain: MarkovChainSpec = None,
    horizon: int = 200,
    trials: int = 64,
    target_gap: float = 1e-8,
    budget: int = 200000,
    threads: int = 1,
) -> StabilityReport:
    """Classify absolute, periodic and Markov asymptotic stability.

    Absolute stability holds exactly when the growth rate is below 1, so
    the verdict follows the certified interval: Stable when upper < 1,
    NotStable when lower >= 1 (a rate of exactly 1 already refutes decay),
    Unknown otherwise.
    """
    chain = chain or MarkovChainSpec.uniform(len(ms))
    est = jsr_bounds.estimate(ms, target_gap=target_gap, budget=budget, max_depth=depth)
    if est.upper < 1.0:
        absolute = "Stable"
    elif est.lower >= 1.0:
        absolute = "NotStable"
    else:
        absolute = "Unknown"

    per_value, per_witness = jsr_bounds.lower_bound_periodic(ms, max_period)
    periodic = "CounterexampleWord" if per_value >= 1.0 else "StableUpTo"

    me = markov_lyapunov(ms, chain, horizon=horizon, trials=trials, threads=threads)
    if me.absorbed_count > 0:
        markov = "ZeroAbsorption"
    elif me.lambda_hat + 3.0 * me.stderr < 0.0:
        markov = "StableEvidence"
    elif me.lambda_hat - 3.0 * me.stderr > 0.0:
        markov = "NotStable"
    else:
        markov = "Unknown"

    return StabilityReport(
        absolute=absolute,
        periodic=periodic,
        markov=markov,
        jsr=est,
        max_period=max_period,
        periodic_witness=per_witness,
        periodic_value=per_value,
        markov_estimate=me,
        config={
            "max_period": max_period,
            "depth": depth,
            "horizon": horizon,
            "trials": trials,
            "target_gap": target_gap,
            "budget": budget,
            "seed": chain.seed,
        },
    )
