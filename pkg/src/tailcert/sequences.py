"""Deterministic index sequences: rates r_n > 0 multiplying the exponent and
sizes y_n > 0 scaling the threshold.

Evaluation accepts any real n >= 1 (certificates use integer indices; the
diagnostics evaluate on real grids).  No symbolic simplification is done:
sequences compare by evaluation on index grids.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NonPositiveRateError, TailcertError
from .util import as_float_array, scalar_or_array


def _check_positive(vals: np.ndarray, what: str):
    if np.any(~np.isfinite(vals)) or np.any(vals <= 0):
        raise NonPositiveRateError(f"{what} evaluated to a non-positive value")


class RateSequence:
    """Map n -> r_n > 0."""

    def evaluate(self, n):
        raise NotImplementedError

    def to_obj(self) -> dict:
        raise NotImplementedError

    def validate_range(self, n_grid) -> None:
        _check_positive(as_float_array(self.evaluate(n_grid)), "rate sequence")


@dataclass(frozen=True)
class ConstSeq(RateSequence):
    value: float

    def evaluate(self, n):
        nn = as_float_array(n)
        return scalar_or_array(np.full_like(nn, float(self.value)), n)

    def to_obj(self):
        return {"form": "const", "value": float(self.value)}


@dataclass(frozen=True)
class LogNSeq(RateSequence):
    """r_n = c * log n (positive for n > 1)."""

    c: float = 1.0

    def evaluate(self, n):
        return scalar_or_array(self.c * np.log(as_float_array(n)), n)

    def to_obj(self):
        return {"form": "log_n", "c": float(self.c)}


@dataclass(frozen=True)
class LinearNSeq(RateSequence):
    """r_n = c * n."""

    c: float = 1.0

    def evaluate(self, n):
        return scalar_or_array(self.c * as_float_array(n), n)

    def to_obj(self):
        return {"form": "linear_n", "c": float(self.c)}


@dataclass(frozen=True)
class DLogNDSeq(RateSequence):
    """r_n = d_n * log(n / d_n) for a dimension sequence d_n < n."""

    dimension: "SizeSequence"

    def evaluate(self, n):
        nn = as_float_array(n)
        d = as_float_array(self.dimension.evaluate(nn))
        return scalar_or_array(d * np.log(nn / d), n)

    def to_obj(self):
        return {"form": "d_log_n_d", "dimension": self.dimension.to_obj()}


@dataclass(frozen=True)
class MinSeq(RateSequence):
    left: RateSequence
    right: RateSequence

    def evaluate(self, n):
        lo = as_float_array(self.left.evaluate(n))
        hi = as_float_array(self.right.evaluate(n))
        return scalar_or_array(np.minimum(lo, hi), n)

    def to_obj(self):
        return {"form": "min", "left": self.left.to_obj(), "right": self.right.to_obj()}


@dataclass(frozen=True)
class CustomSeq(RateSequence):
    """Tabulated values over an explicit n-grid."""

    table: tuple  # tuple of (n, value) pairs

    def _lookup(self, n):
        d = dict(self.table)
        nn = as_float_array(n)
        flat = np.atleast_1d(nn)
        out = np.empty_like(flat)
        for i, v in enumerate(flat):
            key = int(round(float(v)))
            if key not in d or abs(key - float(v)) > 1e-9:
                raise TailcertError(f"custom sequence has no entry for n={v}")
            out[i] = d[key]
        return out.reshape(nn.shape)

    def evaluate(self, n):
        return scalar_or_array(self._lookup(n), n)

    def to_obj(self):
        return {"form": "custom",
                "table": [[int(k), float(v)] for k, v in self.table]}


def rate_sequence_from_obj(obj: dict) -> RateSequence:
    form = obj["form"]
    if form == "const":
        return ConstSeq(float(obj["value"]))
    if form == "log_n":
        return LogNSeq(float(obj["c"]))
    if form == "linear_n":
        return LinearNSeq(float(obj["c"]))
    if form == "d_log_n_d":
        return DLogNDSeq(size_sequence_from_obj(obj["dimension"]))
    if form == "min":
        return MinSeq(rate_sequence_from_obj(obj["left"]),
                      rate_sequence_from_obj(obj["right"]))
    if form == "custom":
        return CustomSeq(tuple((int(k), float(v)) for k, v in obj["table"]))
    raise TailcertError(f"unknown rate sequence form {form!r}")


class SizeSequence:
    """Map n -> y_n > 0 (zero permitted only where a combinator allows it)."""

    def evaluate(self, n):
        raise NotImplementedError

    def to_obj(self) -> dict:
        raise NotImplementedError

    def validate_range(self, n_grid) -> None:
        _check_positive(as_float_array(self.evaluate(n_grid)), "size sequence")


@dataclass(frozen=True)
class ConstSize(SizeSequence):
    value: float

    def evaluate(self, n):
        nn = as_float_array(n)
        return scalar_or_array(np.full_like(nn, float(self.value)), n)

    def to_obj(self):
        return {"form": "const", "value": float(self.value)}


@dataclass(frozen=True)
class MonomialSize(SizeSequence):
    """y_n = c * n**a * (log n)**b."""

    c: float
    a: float
    b: float = 0.0

    def evaluate(self, n):
        nn = as_float_array(n)
        out = self.c * nn ** self.a
        if self.b:
            out = out * np.log(nn) ** self.b
        return scalar_or_array(out, n)

    def to_obj(self):
        return {"form": "monomial", "c": float(self.c), "a": float(self.a),
                "b": float(self.b)}


@dataclass(frozen=True)
class SqrtRateOverNSize(SizeSequence):
    """y_n = sqrt(r_n / n)."""

    rate: RateSequence

    def evaluate(self, n):
        nn = as_float_array(n)
        r = as_float_array(self.rate.evaluate(nn))
        return scalar_or_array(np.sqrt(r / nn), n)

    def to_obj(self):
        return {"form": "sqrt_rate_over_n", "rate": self.rate.to_obj()}


@dataclass(frozen=True)
class PowerOfRateSize(SizeSequence):
    """y_n = r_n**gamma."""

    rate: RateSequence
    gamma: float

    def evaluate(self, n):
        r = as_float_array(self.rate.evaluate(n))
        return scalar_or_array(r ** self.gamma, n)

    def to_obj(self):
        return {"form": "power_of_rate", "rate": self.rate.to_obj(),
                "gamma": float(self.gamma)}


@dataclass(frozen=True)
class NthRootSize(SizeSequence):
    """y_n = n**(1/r_n), evaluated numerically."""

    rate: RateSequence

    def evaluate(self, n):
        nn = as_float_array(n)
        r = as_float_array(self.rate.evaluate(nn))
        return scalar_or_array(nn ** (1.0 / r), n)

    def to_obj(self):
        return {"form": "nth_root", "rate": self.rate.to_obj()}


@dataclass(frozen=True)
class ProductSize(SizeSequence):
    terms: tuple

    def evaluate(self, n):
        out = np.ones_like(as_float_array(n))
        for term in self.terms:
            out = out * as_float_array(term.evaluate(n))
        return scalar_or_array(out, n)

    def to_obj(self):
        return {"form": "product", "terms": [t.to_obj() for t in self.terms]}


@dataclass(frozen=True)
class SumSize(SizeSequence):
    terms: tuple

    def evaluate(self, n):
        out = np.zeros_like(as_float_array(n))
        for term in self.terms:
            out = out + as_float_array(term.evaluate(n))
        return scalar_or_array(out, n)

    def to_obj(self):
        return {"form": "sum", "terms": [t.to_obj() for t in self.terms]}


@dataclass(frozen=True)
class PowSize(SizeSequence):
    """y_n = base_n ** alpha (power transform of a size)."""

    base: SizeSequence
    alpha: float

    def evaluate(self, n):
        b = as_float_array(self.base.evaluate(n))
        return scalar_or_array(b ** self.alpha, n)

    def to_obj(self):
        return {"form": "power", "base": self.base.to_obj(), "alpha": float(self.alpha)}


@dataclass(frozen=True)
class MinSize(SizeSequence):
    """Pointwise minimum of two size maps (ceilings under addition)."""

    left: SizeSequence
    right: SizeSequence

    def evaluate(self, n):
        lo = as_float_array(self.left.evaluate(n))
        hi = as_float_array(self.right.evaluate(n))
        return scalar_or_array(np.minimum(lo, hi), n)

    def to_obj(self):
        return {"form": "min", "left": self.left.to_obj(),
                "right": self.right.to_obj()}


@dataclass(frozen=True)
class CustomSize(SizeSequence):
    table: tuple

    def evaluate(self, n):
        return CustomSeq(self.table).evaluate(n)

    def to_obj(self):
        return {"form": "custom",
                "table": [[int(k), float(v)] for k, v in self.table]}


def size_sequence_from_obj(obj: dict) -> SizeSequence:
    form = obj["form"]
    if form == "const":
        return ConstSize(float(obj["value"]))
    if form == "monomial":
        return MonomialSize(float(obj["c"]), float(obj["a"]), float(obj["b"]))
    if form == "sqrt_rate_over_n":
        return SqrtRateOverNSize(rate_sequence_from_obj(obj["rate"]))
    if form == "power_of_rate":
        return PowerOfRateSize(rate_sequence_from_obj(obj["rate"]), float(obj["gamma"]))
    if form == "nth_root":
        return NthRootSize(rate_sequence_from_obj(obj["rate"]))
    if form == "product":
        return ProductSize(tuple(size_sequence_from_obj(t) for t in obj["terms"]))
    if form == "sum":
        return SumSize(tuple(size_sequence_from_obj(t) for t in obj["terms"]))
    if form == "power":
        return PowSize(size_sequence_from_obj(obj["base"]), float(obj["alpha"]))
    if form == "min":
        return MinSize(size_sequence_from_obj(obj["left"]),
                       size_sequence_from_obj(obj["right"]))
    if form == "custom":
        return CustomSize(tuple((int(k), float(v)) for k, v in obj["table"]))
    raise TailcertError(f"unknown size sequence form {form!r}")
