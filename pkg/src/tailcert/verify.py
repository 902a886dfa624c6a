"""Empirical tail estimation and certificate checking.

estimate_tail draws one batch of replicates per index n (in fixed 64k blocks
with per-block substreams, so worker scheduling cannot change the numbers) and
reuses it across the whole threshold grid: exceedance counts are then
non-increasing in t by construction.  Each (n, t) cell carries the exact
binomial (Clopper-Pearson) upper confidence limit rather than a normal
approximation, since the regime of interest is survival probabilities near
zero.

check_certificate confirms a certificate when every resolvable in-domain probe
has its upper confidence limit below the certified bound.  Probes whose bound
sits below what a zero-exceedance experiment could certify
(resolvability_factor times 1 - delta^(1/m)) carry no information either way
and are reported as skipped rather than failed.

fit_constants concretizes symbolic exponent constants by deterministic grid
search, returning the tightest passing assignment: the largest constants (in
lexicographic order of their names) for which the certificate still passes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import beta as beta_dist

from .certificates import TailCertificate
from .errors import (
    BadGridError,
    InsufficientExceedancesError,
    NoInDomainProbesError,
    SymbolicConstantsError,
    UnsatisfiableError,
)
from .samplers import sample, spec_digest, substream
from .sequences import SizeSequence
from .util import as_float_array, digest, encode_float, decode_float

BLOCK = 65536


def clopper_pearson_upper(k: int, m: int, delta: float) -> float:
    """Exact binomial upper confidence limit at level 1 - delta."""
    if not 0 <= k <= m or m < 1:
        raise BadGridError("need 0 <= k <= m, m >= 1")
    if k >= m:
        return 1.0
    return float(beta_dist.ppf(1.0 - delta, k + 1, m - k))


@dataclass(frozen=True)
class TailProbe:
    n: float
    t: float
    trials: int
    exceedances: int
    ucb: float
    size_value: float

    def to_obj(self):
        return [encode_float(self.n), encode_float(self.t), int(self.trials),
                int(self.exceedances), encode_float(self.ucb),
                encode_float(self.size_value)]

    @staticmethod
    def from_obj(row):
        return TailProbe(decode_float(row[0]), decode_float(row[1]), int(row[2]),
                         int(row[3]), decode_float(row[4]), decode_float(row[5]))


@dataclass(frozen=True)
class EmpiricalTail:
    probes: tuple
    sampler_digest: str
    joint: bool
    delta: float
    seed: int
    source: str = "monte_carlo"  # or "exact_oracle"

    def __post_init__(self):
        if not self.probes:
            raise BadGridError("empirical tail needs at least one probe")

    @property
    def n_values(self):
        return sorted({p.n for p in self.probes})

    def to_document(self):
        return {
            "kind": "empirical_tail",
            "sampler_digest": self.sampler_digest,
            "joint": self.joint,
            "delta": self.delta,
            "seed": int(self.seed),
            "source": self.source,
            "probes": [p.to_obj() for p in self.probes],
        }

    @staticmethod
    def from_document(doc):
        return EmpiricalTail(
            probes=tuple(TailProbe.from_obj(r) for r in doc["probes"]),
            sampler_digest=doc["sampler_digest"],
            joint=bool(doc["joint"]),
            delta=float(doc["delta"]),
            seed=int(doc["seed"]),
            source=doc.get("source", "monte_carlo"),
        )

    def digest(self):
        return digest(self.to_document())


class IIDVariable:
    """Scalar variable that does not change with n: draws are |X|."""

    joint = False

    def __init__(self, spec):
        self.spec = spec

    def draw(self, n, count, rng):
        from .samplers import _draw

        return np.abs(_draw(self.spec, count, rng))

    def digest(self):
        return spec_digest(self.spec)


def estimate_tail(model, size, n_grid, t_grid, m: int, delta: float,
                  seed: int) -> EmpiricalTail:
    """Empirical survival probabilities of |X_n| / y_n over an (n, t) grid.

    model.draw(n, count, rng) returns |X_n| values, or ratios |X_n|/|Y_n|
    directly when model.joint is true (random size arguments are handled by
    such joint samplers).  size may be a SizeSequence or None for joint
    models.  One sample batch per n is shared across the t grid.
    """
    n_grid = list(n_grid)
    t_grid = np.asarray(list(t_grid), dtype=float)
    if m < 1 or len(n_grid) == 0 or len(t_grid) == 0:
        raise BadGridError("empty grid or nonpositive trial count")
    if np.any(np.diff(t_grid) < 0):
        raise BadGridError("t grid must be sorted ascending")
    joint = bool(getattr(model, "joint", False))
    if not joint and not isinstance(size, SizeSequence):
        raise BadGridError("deterministic-size estimation needs a SizeSequence")
    probes = []
    for ni, n in enumerate(n_grid):
        chunks = []
        remaining = m
        b = 0
        while remaining > 0:
            count = min(BLOCK, remaining)
            rng = substream(seed, ni, b)
            chunks.append(np.asarray(model.draw(n, count, rng), dtype=float))
            remaining -= count
            b += 1
        values = np.sort(np.concatenate(chunks))
        if joint:
            y = float("nan")
            ratios = values
        else:
            y = float(size.evaluate(n))
            ratios = values / y
        ks = m - np.searchsorted(ratios, t_grid, side="left")
        for t, k in zip(t_grid, ks):
            probes.append(TailProbe(
                n=float(n), t=float(t), trials=m, exceedances=int(k),
                ucb=clopper_pearson_upper(int(k), m, delta),
                size_value=y,
            ))
    return EmpiricalTail(
        probes=tuple(probes), sampler_digest=model.digest(), joint=joint,
        delta=delta, seed=int(seed), source="monte_carlo",
    )


def exact_tail(tail_fn, size, n_grid, t_grid, delta: float = 0.0,
               label: str = "exact") -> EmpiricalTail:
    """Oracle-backed tail: each probe's ucb is the exact survival probability
    tail_fn(n, t) of the normalized variable."""
    probes = []
    for n in n_grid:
        y = float(size.evaluate(n)) if isinstance(size, SizeSequence) else float("nan")
        for t in t_grid:
            p = float(tail_fn(n, t))
            if not 0.0 <= p <= 1.0:
                raise BadGridError(f"oracle tail {p} outside [0, 1]")
            probes.append(TailProbe(n=float(n), t=float(t), trials=0,
                                    exceedances=0, ucb=p, size_value=y))
    return EmpiricalTail(probes=tuple(probes), sampler_digest=digest(label),
                         joint=False, delta=delta, seed=0, source="exact_oracle")


@dataclass(frozen=True)
class Verdict:
    passed: bool
    worst_slack: float
    witness: TailProbe | None
    n_checked: int
    n_skipped: int
    fitted_constants: tuple = ()
    unresolved_exceedances: int = 0

    def to_obj(self):
        return {
            "passed": bool(self.passed),
            "worst_slack": encode_float(self.worst_slack),
            "witness": None if self.witness is None else self.witness.to_obj(),
            "n_checked": self.n_checked,
            "n_skipped": self.n_skipped,
            "fitted_constants": [[k, v] for k, v in self.fitted_constants],
            "unresolved_exceedances": self.unresolved_exceedances,
        }


def _resolvability_floor(tail: EmpiricalTail, factor: float) -> float:
    if tail.source == "exact_oracle":
        return 0.0
    m = max(p.trials for p in tail.probes)
    return factor * (1.0 - tail.delta ** (1.0 / m))


def check_certificate(cert: TailCertificate, tail: EmpiricalTail,
                      bindings=None, resolvability_factor: float = 10.0,
                      fitted=()) -> Verdict:
    """Pass iff ucb <= bound at every resolvable in-domain probe.

    Out-of-domain probes (n below the threshold, t outside [C2, R_n]) and
    probes below the resolvability floor are skipped and counted; skipped
    probes that nevertheless saw exceedances are reported separately since
    they may hide a violation the trial count cannot adjudicate."""
    if not cert.is_concrete and not bindings:
        raise SymbolicConstantsError("fit the certificate constants first")
    floor = _resolvability_floor(tail, resolvability_factor)
    worst = math.inf
    witness = None
    checked = skipped = unresolved = 0
    for p in tail.probes:
        if not bool(cert.in_domain(p.n, p.t)):
            skipped += 1
            continue
        bound = float(cert.eval_bound(p.n, p.t, bindings=bindings))
        if bound < floor:
            skipped += 1
            if p.exceedances > 0:
                unresolved += 1
            continue
        checked += 1
        if p.ucb <= 0.0:
            slack = math.inf  # empty empirical tail confirms any bound
        elif bound <= 0.0:
            slack = -math.inf
        else:
            slack = math.log(bound) - math.log(p.ucb)
        if slack < worst:
            worst = slack
            witness = p
    if checked == 0:
        raise NoInDomainProbesError("no resolvable in-domain probes to check")
    return Verdict(passed=worst >= 0.0, worst_slack=worst, witness=witness,
                   n_checked=checked, n_skipped=skipped,
                   fitted_constants=tuple(fitted),
                   unresolved_exceedances=unresolved)


def _constant_grid(lo: float, hi: float, points_per_decade: int) -> np.ndarray:
    if not 0 < lo < hi:
        raise BadGridError("search bounds must satisfy 0 < lo < hi")
    num = max(2, int(round(points_per_decade * math.log10(hi / lo))) + 1)
    return np.geomspace(lo, hi, num)


def fit_constants(shape: TailCertificate, tails, search: dict,
                  points_per_decade: int = 64,
                  resolvability_factor: float = 10.0):
    """Concretize symbolic constants by grid search over `search` bounds.

    tails may be one EmpiricalTail or a list; the assignment must pass on all
    of them.  Among passing assignments the lexicographically largest one (by
    sorted constant name) wins: larger exponent constants mean a tighter
    certificate.  Deterministic given inputs.  Raises UnsatisfiableError when
    no grid point passes."""
    if isinstance(tails, EmpiricalTail):
        tails = [tails]
    names = sorted(shape.f.symbols())
    if not names or set(names) != set(search):
        raise SymbolicConstantsError(
            f"search bounds must cover exactly the symbols {names}"
        )
    grids = [_constant_grid(*search[name], points_per_decade) for name in names]
    best = None
    best_verdicts = None

    def rec(idx, assignment):
        nonlocal best, best_verdicts
        if best is not None:
            return
        if idx == len(names):
            verdicts = []
            for tail in tails:
                try:
                    v = check_certificate(
                        shape, tail, bindings=assignment,
                        resolvability_factor=resolvability_factor,
                        fitted=tuple(sorted(assignment.items())),
                    )
                except NoInDomainProbesError:
                    return
                if not v.passed:
                    return
                verdicts.append(v)
            best = dict(assignment)
            best_verdicts = verdicts
            return
        for val in grids[idx][::-1]:  # largest first: tightest wins
            rec(idx + 1, {**assignment, names[idx]: float(val)})
            if best is not None:
                return

    rec(0, {})
    if best is None:
        raise UnsatisfiableError("no constant assignment on the grid passes")
    fitted = shape.with_constants(best)
    verdict = min(best_verdicts, key=lambda v: v.worst_slack)
    return fitted, verdict


@dataclass(frozen=True)
class RateFitRecord:
    slope: float
    intercept: float
    r_squared: float
    n_points: int

    def to_obj(self):
        return {"slope": encode_float(self.slope),
                "intercept": encode_float(self.intercept),
                "r_squared": encode_float(self.r_squared),
                "n_points": self.n_points}


def _probe_phat(tail: EmpiricalTail, p: TailProbe):
    if tail.source == "exact_oracle":
        return p.ucb
    return p.exceedances / p.trials if p.trials else float("nan")


def rate_diagnostic(cert: TailCertificate, tails, min_exceedances: int = 10,
                    domain_only: bool = False, bindings=None) -> RateFitRecord:
    """Least squares of -log(empirical survival) against r_n * f(t).

    Pools every qualifying probe (k >= min_exceedances for Monte Carlo tails,
    positive exact values for oracle tails) across the supplied tails; f is
    evaluated on the raw threshold even below C2 unless domain_only is set.
    A well-calibrated certificate family shows slope at least about one."""
    if isinstance(tails, EmpiricalTail):
        tails = [tails]
    xs, ys, ns = [], [], set()
    for tail in tails:
        for p in tail.probes:
            phat = _probe_phat(tail, p)
            if tail.source == "monte_carlo" and p.exceedances < min_exceedances:
                continue
            if not (phat and phat > 0):
                continue
            if domain_only and not bool(cert.in_domain(p.n, p.t)):
                continue
            r = float(cert.rate.evaluate(p.n))
            fv = float(cert.f.evaluate(p.t, bindings))
            xs.append(r * fv)
            ys.append(-math.log(phat))
            ns.add(p.n)
    if len(ns) < 3 or len(xs) < 3:
        raise InsufficientExceedancesError(
            f"need qualifying probes at >= 3 indices, got {len(ns)} over "
            f"{len(xs)} probes"
        )
    x = np.asarray(xs)
    y = np.asarray(ys)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid ** 2)) / ss_tot if ss_tot > 0 else 0.0
    return RateFitRecord(float(slope), float(intercept), float(r2), len(xs))


@dataclass(frozen=True)
class LittleORecord:
    entries: tuple  # (n, value) with value = log(ucb)/r_n, -inf sentinel
    decreasing: bool
    final_below_threshold: bool
    threshold: float

    def to_obj(self):
        return {
            "entries": [[encode_float(n), encode_float(v)] for n, v in self.entries],
            "decreasing": self.decreasing,
            "final_below_threshold": self.final_below_threshold,
            "threshold": self.threshold,
        }


def little_o_diagnostic(tail: EmpiricalTail, c: float, rate,
                        threshold: float = -5.0) -> LittleORecord:
    """Divergence diagnostic for a vanishing family: the sequence
    log(ucb at t = c) / r_n should decrease without bound in n.

    Zero-exceedance Monte Carlo probes (empirical survival exactly zero)
    report the -inf sentinel, the conventional value of log 0."""
    if c <= 0:
        raise BadGridError("c must be positive")
    entries = []
    for n in tail.n_values:
        cands = [p for p in tail.probes
                 if p.n == n and abs(p.t - c) <= 1e-9 * max(1.0, abs(c))]
        if not cands:
            continue
        p = cands[0]
        r = float(rate.evaluate(n))
        if tail.source == "monte_carlo" and p.exceedances == 0:
            val = float("-inf")
        elif p.ucb == 0.0:
            val = float("-inf")
        else:
            val = math.log(p.ucb) / r
        entries.append((float(n), val))
    if len(entries) < 3:
        raise BadGridError("need probes at t = c for at least 3 indices")
    vals = [v for _, v in entries]
    decreasing = all(b <= a + 1e-12 for a, b in zip(vals, vals[1:]))
    return LittleORecord(
        entries=tuple(entries),
        decreasing=decreasing,
        final_below_threshold=vals[-1] <= threshold,
        threshold=threshold,
    )


def tail_to_csv(tail: EmpiricalTail, cert: TailCertificate | None = None,
                bindings=None) -> str:
    """Flat CSV (n, t, m, k, ucb, bound, slack); bound and slack are empty
    off the certificate's domain or when no certificate is supplied."""
    lines = ["n,t,m,k,ucb,bound,slack"]
    for p in tail.probes:
        bound = slack = ""
        if cert is not None and bool(cert.in_domain(p.n, p.t)):
            b = float(cert.eval_bound(p.n, p.t, bindings=bindings))
            bound = repr(b)
            slack = repr(math.log(b) - math.log(p.ucb)) if p.ucb > 0 else "inf"
        lines.append(f"{p.n!r},{p.t!r},{p.trials},{p.exceedances},{p.ucb!r},"
                     f"{bound},{slack}")
    return "\n".join(lines) + "\n"
