"""Certificate constructors from distributional hypotheses.

Every constructor returns a sound TailCertificate for the stated hypothesis:
moment bounds go through the Markov route (exponent log t, threshold constant
e so the exponent is positive there); psi-norm hypotheses bound the r_n-th
moment by r_n^(1/alpha); sample means use Bernstein/Hoeffding-type shapes
whose absolute constants stay symbolic until fitted against data — except
the Gaussian mean, where c = 1/2 follows from the exact normal tail
Phi_bar(x) <= exp(-x^2/2)/2 and everything is concrete.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .certificates import Provenance, TailCertificate
from .combinators import default_probe_grid
from .errors import (
    BadAlphaError,
    RateBelowDimensionError,
    RateBelowOneError,
    RateTooSmallError,
    TailcertError,
)
from .ratefn import LinearRate, LogRate, PowerRate, SymbolicConst
from .sequences import (
    ConstSize,
    LinearNSeq,
    MinSeq,
    NthRootSize,
    PowerOfRateSize,
    ProductSize,
    RateSequence,
    SizeSequence,
    SqrtRateOverNSize,
    rate_sequence_from_obj,
    size_sequence_from_obj,
)
from .util import as_float_array

E = math.e


@dataclass(frozen=True)
class MomentHypothesis:
    """E^(1/r_n)|X_n|^(r_n) <= Y_n with moment order r_n >= 1."""

    order: RateSequence
    bound: SizeSequence

    def validate(self, n_grid=None) -> None:
        grid = n_grid if n_grid is not None else default_probe_grid(
            self.order, self.bound)
        orders = as_float_array(self.order.evaluate(grid))
        if np.any(orders < 1.0 - 1e-12):
            raise TailcertError("moment order must be >= 1 on the range")
        self.bound.validate_range(grid)

    def to_document(self):
        return {"kind": "moment_hypothesis", "order": self.order.to_obj(),
                "bound": self.bound.to_obj()}

    @staticmethod
    def from_document(doc):
        return MomentHypothesis(rate_sequence_from_obj(doc["order"]),
                                size_sequence_from_obj(doc["bound"]))


@dataclass(frozen=True)
class PsiNormHypothesis:
    """psi_alpha-norm control, assumed rescaled so the norm bound is <= 1.

    alpha = 2 is the sub-Gaussian case, alpha = 1 sub-exponential;
    per_coordinate marks vector hypotheses holding coordinatewise."""

    alpha: float
    norm_bound: float = 1.0
    per_coordinate: bool = False
    dimension: SizeSequence | None = None

    def __post_init__(self):
        if self.alpha < 1:
            raise BadAlphaError(f"alpha must be >= 1, got {self.alpha}")
        if not 0 < self.norm_bound <= 1.0 + 1e-12:
            raise TailcertError(
                "norm_bound must lie in (0, 1]; rescale the variable by its "
                "psi norm first"
            )

    def to_document(self):
        return {
            "kind": "psi_norm_hypothesis",
            "alpha": float(self.alpha),
            "norm_bound": float(self.norm_bound),
            "per_coordinate": bool(self.per_coordinate),
            "dimension": None if self.dimension is None else self.dimension.to_obj(),
        }

    @staticmethod
    def from_document(doc):
        return PsiNormHypothesis(
            alpha=float(doc["alpha"]),
            norm_bound=float(doc["norm_bound"]),
            per_coordinate=bool(doc["per_coordinate"]),
            dimension=None if doc.get("dimension") is None
            else size_sequence_from_obj(doc["dimension"]),
        )


def from_moment_bound(h: MomentHypothesis, n_grid=None) -> TailCertificate:
    """Markov at moment order r_n: P(|X| >= t Y) <= t^(-r_n) for t > 0."""
    h.validate(n_grid)
    return TailCertificate(
        size=h.bound,
        rate=h.order,
        c1=1.0,
        c2=E,
        n_threshold=1,
        f=LogRate(),
        flavor="O",
        provenance=Provenance("catalog.from_moment_bound"),
    )


def lp_norm_cert(h: MomentHypothesis, n_grid=None) -> TailCertificate:
    """l_{r_n} norm of an n-vector with coordinatewise moment bound Y_n:
    the norm obeys the same Markov tail at size n^(1/r_n) Y_n."""
    h.validate(n_grid)
    return TailCertificate(
        size=ProductSize((NthRootSize(h.order), h.bound)),
        rate=h.order,
        c1=1.0,
        c2=E,
        n_threshold=1,
        f=LogRate(),
        flavor="O",
        provenance=Provenance("catalog.lp_norm"),
    )


def linf_norm_cert(h: MomentHypothesis, c: float,
                   n_grid=None) -> TailCertificate:
    """Sup-norm bound at size e^(1/c) Y_n, valid when r_n >= c log n: then
    n^(1/r_n) <= e^(1/c) and the l_p route transfers to l_inf."""
    if c <= 0:
        raise RateTooSmallError("c must be positive")
    grid = n_grid if n_grid is not None else default_probe_grid(
        h.order, h.bound, n_start=2)
    h.validate(grid)
    orders = as_float_array(h.order.evaluate(grid))
    need = c * np.log(as_float_array(grid))
    if np.any(orders < need * (1 - 1e-12)):
        raise RateTooSmallError("moment order grows slower than c log n")
    return TailCertificate(
        size=ProductSize((ConstSize(math.exp(1.0 / c)), h.bound)),
        rate=h.order,
        c1=1.0,
        c2=E,
        n_threshold=1,
        f=LogRate(),
        flavor="O",
        provenance=Provenance("catalog.linf_norm", params=(("c", float(c)),)),
    )


def _check_rate_at_least_one(rate: RateSequence, grid) -> None:
    if np.any(as_float_array(rate.evaluate(grid)) < 1.0 - 1e-12):
        raise RateBelowOneError("rate must be >= 1 on the range")


def from_psi_norm(h: PsiNormHypothesis, rate: RateSequence,
                  n_grid=None) -> TailCertificate:
    """Scalar tail from a unit psi_alpha bound: the r_n-th moment is at most
    r_n^(1/alpha), so Markov yields size r_n^(1/alpha) with log exponent."""
    grid = n_grid if n_grid is not None else default_probe_grid(rate)
    _check_rate_at_least_one(rate, grid)
    return TailCertificate(
        size=PowerOfRateSize(rate, 1.0 / h.alpha),
        rate=rate,
        c1=1.0,
        c2=E,
        n_threshold=1,
        f=LogRate(),
        flavor="O",
        provenance=Provenance("catalog.from_psi_norm",
                              params=(("alpha", float(h.alpha)),)),
    )


def psi_lp_norm_cert(h: PsiNormHypothesis, rate: RateSequence,
                     n_grid=None) -> TailCertificate:
    """Vector l_{r_n} norm under coordinatewise unit psi_alpha bounds."""
    grid = n_grid if n_grid is not None else default_probe_grid(rate)
    _check_rate_at_least_one(rate, grid)
    return TailCertificate(
        size=ProductSize((NthRootSize(rate), PowerOfRateSize(rate, 1.0 / h.alpha))),
        rate=rate,
        c1=1.0,
        c2=E,
        n_threshold=1,
        f=LogRate(),
        flavor="O",
        provenance=Provenance("catalog.psi_lp_norm",
                              params=(("alpha", float(h.alpha)),)),
    )


def psi_linf_norm_cert(h: PsiNormHypothesis, rate: RateSequence, c: float,
                       n_grid=None) -> TailCertificate:
    """Vector sup norm under coordinatewise unit psi_alpha bounds, for rates
    r_n >= c log n."""
    if c <= 0:
        raise RateTooSmallError("c must be positive")
    grid = n_grid if n_grid is not None else default_probe_grid(rate, n_start=2)
    _check_rate_at_least_one(rate, grid)
    need = c * np.log(as_float_array(grid))
    if np.any(as_float_array(rate.evaluate(grid)) < need * (1 - 1e-12)):
        raise RateTooSmallError("rate grows slower than c log n")
    return TailCertificate(
        size=ProductSize((ConstSize(math.exp(1.0 / c)),
                          PowerOfRateSize(rate, 1.0 / h.alpha))),
        rate=rate,
        c1=1.0,
        c2=E,
        n_threshold=1,
        f=LogRate(),
        flavor="O",
        provenance=Provenance("catalog.psi_linf_norm",
                              params=(("alpha", float(h.alpha)), ("c", float(c)))),
    )


def subgaussian_l2_cert(dim: SizeSequence, rate: RateSequence,
                        c_name: str = "subgaussian_l2_c",
                        dim_constant: float = 1.0,
                        n_grid=None) -> TailCertificate:
    """Euclidean norm of a centered unit-psi2 vector: size sqrt(r_n) whenever
    r_n >= dim_constant * d_n, with a symbolic linear exponent constant to be
    fitted."""
    grid = n_grid if n_grid is not None else default_probe_grid(rate, dim)
    rates = as_float_array(rate.evaluate(grid))
    dims = as_float_array(dim.evaluate(grid))
    if np.any(rates < dim_constant * dims * (1 - 1e-12)):
        raise RateBelowDimensionError(
            "rate must dominate the declared multiple of the dimension"
        )
    return TailCertificate(
        size=PowerOfRateSize(rate, 0.5),
        rate=rate,
        c1=1.0,
        c2=E,
        n_threshold=1,
        f=LinearRate(SymbolicConst(c_name)),
        flavor="O",
        provenance=Provenance("catalog.subgaussian_l2",
                              params=(("dim_constant", float(dim_constant)),)),
    )


def sample_mean_cert(alpha: int, rate: RateSequence,
                     c_name: str | None = None) -> TailCertificate:
    """Centered mean of n independent summands with unit psi_alpha norms
    (declared by the caller), at size sqrt(r_n / n).

    alpha = 1: Bernstein-type shape, linear exponent, output rate r_n ^ n.
    alpha = 2: Hoeffding-type shape, quadratic exponent, output rate r_n.
    The absolute constant is symbolic; C2 = 1 mirrors the threshold ranges of
    the two inequalities."""
    if alpha == 1:
        name = c_name or "bernstein_c"
        return TailCertificate(
            size=SqrtRateOverNSize(rate),
            rate=MinSeq(rate, LinearNSeq(1.0)),
            c1=2.0,
            c2=1.0,
            n_threshold=1,
            f=LinearRate(SymbolicConst(name)),
            flavor="O",
            provenance=Provenance("catalog.sample_mean", params=(("alpha", 1),)),
        )
    if alpha == 2:
        name = c_name or "hoeffding_c"
        return TailCertificate(
            size=SqrtRateOverNSize(rate),
            rate=rate,
            c1=E,
            c2=1.0,
            n_threshold=1,
            f=PowerRate(SymbolicConst(name), 2.0),
            flavor="O",
            provenance=Provenance("catalog.sample_mean", params=(("alpha", 2),)),
        )
    raise BadAlphaError("sample mean certificates support alpha in {1, 2}")


def gaussian_mean_cert(rate: RateSequence) -> TailCertificate:
    """Mean of n standard normals: Xbar_n ~ N(0, 1/n) and
    P(|Xbar| >= t sqrt(r_n/n)) = 2 Phi_bar(t sqrt(r_n)) <= 2 exp(-r_n t^2 / 2),
    so the constant 1/2 is exact and nothing is left symbolic."""
    return TailCertificate(
        size=SqrtRateOverNSize(rate),
        rate=rate,
        c1=2.0,
        c2=1.0,
        n_threshold=1,
        f=PowerRate(0.5, 2.0),
        flavor="O",
        provenance=Provenance("catalog.gaussian_mean"),
    )
