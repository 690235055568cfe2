"""Monte Carlo estimation of expected k-facet counts of random samples.

Two routes to the same quantity: direct simulation (sample, certify, count),
and an integral formula driven by the law of the halfplane mass cut off by
the line through two random points.  Both count a balanced pair once per
side, so at the level k = (n-2)/2 each such pair contributes 2; away from
that level the statistic is the plain two-bucket k-facet count.

The factor-2 integral form relies on the mass above a random two-point line
being distributed like the mass below it, which holds for centrally
symmetric distributions (and is what the cross-validation suite tests).
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional, Sequence, Tuple

import numpy as np

from .dist import (
    DistributionSpec,
    OrientedLine,
    halfplane_measure,
    cell_index,
    OnPartitionLine,
    sample,
    spec_id,
)
from .geom import PointSet, certify_position, rational_perturb
from .kfacet import KOutOfRange, enumerate_k_edges_sweep


class EstimatorError(Exception):
    pass


class KMismatch(EstimatorError):
    """The record's (n, k) is not at the balanced level."""


@dataclass
class EstimateRecord:
    method: str  # "direct" | "formula"
    n: int
    k: int
    trials: int
    mean: float
    stderr: Optional[float]  # None when trials < 2
    seed: int
    spec: str
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.stderr is not None and not (self.stderr >= 0):
            raise ValueError("stderr must be nonnegative")


@dataclass
class EmpiricalCdf:
    """Sorted sample of halfplane masses in [0, 1]."""

    values: Tuple[float, ...]
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        vals = tuple(sorted(float(v) for v in self.values))
        if vals and (vals[0] < 0.0 or vals[-1] > 1.0):
            raise ValueError("cdf samples must lie in [0, 1]")
        object.__setattr__(self, "values", vals)

    def __len__(self):
        return len(self.values)

    def cdf(self, t: float) -> float:
        if not self.values:
            raise ValueError("empty sample")
        return bisect_right(self.values, t) / len(self.values)

    def quantile(self, q: float) -> float:
        if not self.values:
            raise ValueError("empty sample")
        if not 0 <= q <= 1:
            raise ValueError("quantile level must be in [0, 1]")
        idx = min(len(self.values) - 1, max(0, math.ceil(q * len(self.values)) - 1))
        return self.values[idx]


def _mean_stderr(xs: Sequence[float]) -> Tuple[float, Optional[float]]:
    m = len(xs)
    if min(xs) == max(xs):
        # constant sample: exact mean, zero spread (no accumulation residue)
        return xs[0], (None if m < 2 else 0.0)
    mean = sum(xs) / m
    if m < 2:
        return mean, None
    var = sum((x - mean) ** 2 for x in xs) / (m - 1)
    return mean, math.sqrt(var / m)


def _certified_sample(spec: DistributionSpec, n: int, trial_seed: int):
    """Sample n points and certify; perturb on degeneracy.  Returns
    (point set, perturbed flag)."""
    s = sample(spec, n, seed=trial_seed)
    rep = certify_position(s)
    if rep.ok:
        return s, False
    s2 = rational_perturb(s, magnitude="1/1099511627776", seed=trial_seed & 0x7FFFFFFF)
    return s2, True


def direct_expected_k_edges_multi(spec: DistributionSpec, n: int,
                                  ks: Sequence[int], trials: int,
                                  seed: int) -> Dict[int, EstimateRecord]:
    """One sampling run, k-facet counts read off for every requested k.

    All k share the same trials, so records are comparable but correlated.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    ks = list(ks)
    for k in ks:
        if not 0 <= k <= n - 2:
            raise KOutOfRange(f"k={k} outside [0, {n - 2}]")
    master = np.random.default_rng(seed)
    trial_seeds = [int(x) for x in master.integers(0, 2**62, size=trials)]
    counts: Dict[int, list] = {k: [] for k in ks}
    perturbed = 0
    for ts in trial_seeds:
        s, fixed = _certified_sample(spec, n, ts)
        perturbed += fixed
        table = enumerate_k_edges_sweep(s)
        for k in ks:
            counts[k].append(len(table.bucket(k)) + len(table.bucket(n - 2 - k)))
    out = {}
    for k in ks:
        mean, stderr = _mean_stderr(counts[k])
        out[k] = EstimateRecord(method="direct", n=n, k=k, trials=trials,
                                mean=mean, stderr=stderr, seed=seed,
                                spec=spec_id(spec),
                                meta={"perturbed_trials": perturbed})
    return out


def direct_expected_k_edges(spec: DistributionSpec, n: int, k: int,
                            trials: int, seed: int) -> EstimateRecord:
    """Mean and stderr of the two-sided k-facet count over independent samples.

    Degenerate samples are nudged by a tiny rational perturbation and the
    event count lands in record.meta["perturbed_trials"].
    """
    return direct_expected_k_edges_multi(spec, n, [k], trials, seed)[k]


def _draw_pair_line(spec: DistributionSpec, rng: np.random.Generator):
    """One two-point line through iid draws; None for a degenerate pair."""
    pts = sample(spec, 2, seed=int(rng.integers(0, 2**62)))
    p, q = pts[0], pts[1]
    if p.x == q.x:
        return None
    return OrientedLine.through_points(p, q)


def formula_expected_k_edges(spec: DistributionSpec, n: int, k: int,
                             pair_samples: int, seed: int,
                             measure_fn: Optional[Callable] = None) -> EstimateRecord:
    """Estimate 2 C(n,2) C(n-2,k) E[T^k (1-T)^(n-2-k)] by pair sampling.

    T is the halfplane mass strictly above the line through two iid points.
    Each sample's integrand is assembled in log space (lgamma binomials), so
    the estimate stays finite for n up to 10**4.  Vertical or coincident
    pairs are resampled and counted in record.meta["degenerate_pairs"].
    measure_fn(spec, line) overrides the mass computation, for calibration
    against constant stubs.
    """
    if not 0 <= k <= n - 2:
        raise KOutOfRange(f"k={k} outside [0, {n - 2}]")
    if pair_samples < 1:
        raise ValueError("pair_samples must be >= 1")
    if measure_fn is None:
        measure_fn = halfplane_measure
    m = n - 2 - k
    log_const = (math.log(2.0)
                 + math.lgamma(n + 1) - math.lgamma(3.0) - math.lgamma(n - 1)
                 + math.lgamma(n - 1) - math.lgamma(k + 1) - math.lgamma(m + 1))
    rng = np.random.default_rng(seed)
    vals = []
    degenerate = 0
    while len(vals) < pair_samples:
        line = _draw_pair_line(spec, rng)
        if line is None:
            degenerate += 1
            if degenerate > 10 * pair_samples + 100:
                raise EstimatorError("sampler keeps producing degenerate pairs")
            continue
        t = float(measure_fn(spec, line))
        if (k > 0 and t <= 0.0) or (m > 0 and t >= 1.0):
            vals.append(0.0)
            continue
        log_t = k * math.log(t) if k > 0 else 0.0
        log_1t = m * math.log1p(-t) if m > 0 else 0.0
        vals.append(math.exp(log_const + log_t + log_1t))
    mean, stderr = _mean_stderr(vals)
    return EstimateRecord(method="formula", n=n, k=k, trials=pair_samples,
                          mean=mean, stderr=stderr, seed=seed,
                          spec=spec_id(spec),
                          meta={"degenerate_pairs": degenerate})


def conditional_t_samples(spec: DistributionSpec, lines: Sequence[float],
                          pair_samples: int, seed: int) -> EmpiricalCdf:
    """Halfplane masses conditioned on both points sharing a vertical slab.

    Rejection sampling: draw pairs, keep those whose endpoints land in the
    same cell of the vertical partition.  Acceptance rate is recorded; a
    point exactly on a partition line counts as a rejection.
    """
    if pair_samples < 1:
        raise ValueError("pair_samples must be >= 1")
    rng = np.random.default_rng(seed)
    kept = []
    proposals = 0
    while len(kept) < pair_samples:
        proposals += 1
        if proposals > 1000 * pair_samples + 1000:
            raise EstimatorError("same-cell rejection rate too high")
        pts = sample(spec, 2, seed=int(rng.integers(0, 2**62)))
        p, q = pts[0], pts[1]
        try:
            if cell_index(lines, p) != cell_index(lines, q):
                continue
        except OnPartitionLine:
            continue
        if p.x == q.x:
            continue
        t = float(halfplane_measure(spec, OrientedLine.through_points(p, q)))
        kept.append(min(1.0, max(0.0, t)))
    return EmpiricalCdf(tuple(kept),
                        meta={"acceptance_rate": pair_samples / proposals,
                              "proposals": proposals, "seed": seed})


def stirling_envelope(n: int, k: int) -> float:
    """sqrt(n-2) / (sqrt(k) sqrt(n-2-k)), an upper envelope for the peak
    integrand weight 2 C(n-2,k) (k/(n-2))^k ((n-2-k)/(n-2))^(n-2-k).

    The envelope inequality is re-checked in log space on every call.
    """
    if not 1 <= k <= n - 3:
        raise KOutOfRange(f"k={k} outside [1, {n - 3}]")
    m = n - 2 - k
    env = math.sqrt(n - 2) / (math.sqrt(k) * math.sqrt(m))
    log_peak = (math.log(2.0)
                + math.lgamma(n - 1) - math.lgamma(k + 1) - math.lgamma(m + 1)
                + k * math.log(k / (n - 2)) + m * math.log(m / (n - 2)))
    if log_peak > math.log(env) + 1e-9:
        raise EstimatorError(f"envelope inequality violated at n={n}, k={k}")
    return env


@dataclass
class BoundReport:
    n: int
    k: int
    bound: float
    mean: float
    stderr: Optional[float]
    satisfied_within: bool
    violation: bool


def check_count_bound(record: EstimateRecord) -> BoundReport:
    """Compare a direct estimate against the envelope bound 10 n (k+1)^(1/4).

    satisfied_within means mean + 3 stderr clears the bound; violation is
    flagged only when mean - 3 stderr exceeds it, so noise alone never
    produces a violation.
    """
    bound = 10.0 * record.n * (record.k + 1) ** 0.25
    s = record.stderr if record.stderr is not None else 0.0
    return BoundReport(n=record.n, k=record.k, bound=bound,
                       mean=record.mean, stderr=record.stderr,
                       satisfied_within=record.mean + 3 * s <= bound,
                       violation=record.mean - 3 * s > bound)


def halving_ratio_report(record: EstimateRecord) -> float:
    """mean / n^(3/2) at the balanced level, for scaling studies."""
    if record.n % 2 != 0 or record.k != (record.n - 2) // 2:
        raise KMismatch(f"record (n={record.n}, k={record.k}) is not at the "
                        "balanced level of an even n")
    return record.mean / record.n**1.5
