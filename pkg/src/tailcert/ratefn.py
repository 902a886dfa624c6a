"""Rate functions: the non-decreasing, positive, divergent f(t) shaping the
exponent of an upper tail bound c1 * exp(-r_n * f(t)), plus the non-increasing
counterparts used by lower-tail certificates.

Forms are closed under the combinator algebra: pointwise minimum, additive
shift, argument rescaling t -> t/a and argument powers t -> t^p.  Scalar
parameters may be named symbolic constants; evaluation then requires a
binding, and certificates carrying unresolved symbols refuse numeric use
until fitted.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SymbolicConstantsError, TailcertError
from .util import as_float_array, scalar_or_array


@dataclass(frozen=True)
class SymbolicConst:
    """Named positive constant to be fitted later."""

    name: str

    def to_obj(self):
        return {"symbol": self.name}


def _resolve(value, bindings):
    if isinstance(value, SymbolicConst):
        if bindings and value.name in bindings:
            return float(bindings[value.name])
        raise SymbolicConstantsError(
            f"constant '{value.name}' has no binding; fit it first"
        )
    return float(value)


def _sub(value, bindings):
    if isinstance(value, SymbolicConst) and bindings and value.name in bindings:
        return float(bindings[value.name])
    return value


def _symbols(value) -> frozenset:
    return frozenset([value.name]) if isinstance(value, SymbolicConst) else frozenset()


def _param_obj(value):
    return value.to_obj() if isinstance(value, SymbolicConst) else float(value)


def _param_from_obj(obj):
    if isinstance(obj, dict) and "symbol" in obj:
        return SymbolicConst(obj["symbol"])
    return float(obj)


class RateFunction:
    """Common interface of all exponent shapes."""

    def evaluate(self, t, bindings=None):
        raise NotImplementedError

    def symbols(self) -> frozenset:
        return frozenset()

    def substitute(self, bindings) -> "RateFunction":
        return self

    def to_obj(self) -> dict:
        raise NotImplementedError

    def threshold_above(self, level: float, t_start: float, t_cap: float = 1e30,
                        bindings=None) -> float:
        """Smallest t >= t_start (up to bisection tolerance) with f(t) >= level.

        Relies on monotonicity; doubles out to t_cap and then bisects.
        """
        lo = float(t_start)
        if float(self.evaluate(lo, bindings)) >= level:
            return lo
        hi = max(lo, 1.0)
        while float(self.evaluate(hi, bindings)) < level:
            hi *= 2.0
            if hi > t_cap:
                raise TailcertError(
                    f"no t <= {t_cap:g} reaches level {level:g}"
                )
        for _ in range(100):
            mid = 0.5 * (lo + hi)
            if float(self.evaluate(mid, bindings)) >= level:
                hi = mid
            else:
                lo = mid
        return hi


@dataclass(frozen=True)
class LogRate(RateFunction):
    """f(t) = log t."""

    def evaluate(self, t, bindings=None):
        tt = as_float_array(t)
        return scalar_or_array(np.log(tt), t)

    def to_obj(self):
        return {"form": "log"}


@dataclass(frozen=True)
class LinearRate(RateFunction):
    """f(t) = c * t."""

    c: object

    def evaluate(self, t, bindings=None):
        c = _resolve(self.c, bindings)
        return scalar_or_array(c * as_float_array(t), t)

    def symbols(self):
        return _symbols(self.c)

    def substitute(self, bindings):
        return LinearRate(_sub(self.c, bindings))

    def to_obj(self):
        return {"form": "linear", "c": _param_obj(self.c)}


@dataclass(frozen=True)
class PowerRate(RateFunction):
    """f(t) = c * t**gamma."""

    c: object
    gamma: float

    def evaluate(self, t, bindings=None):
        c = _resolve(self.c, bindings)
        return scalar_or_array(c * as_float_array(t) ** self.gamma, t)

    def symbols(self):
        return _symbols(self.c)

    def substitute(self, bindings):
        return PowerRate(_sub(self.c, bindings), self.gamma)

    def to_obj(self):
        return {"form": "power", "c": _param_obj(self.c), "gamma": float(self.gamma)}


@dataclass(frozen=True)
class LinearCappedRate(RateFunction):
    """f(t) = c * min(t**2, t): quadratic near zero, linear in the far tail."""

    c: object

    def evaluate(self, t, bindings=None):
        c = _resolve(self.c, bindings)
        tt = as_float_array(t)
        return scalar_or_array(c * np.minimum(tt * tt, tt), t)

    def symbols(self):
        return _symbols(self.c)

    def substitute(self, bindings):
        return LinearCappedRate(_sub(self.c, bindings))

    def to_obj(self):
        return {"form": "linear_capped", "c": _param_obj(self.c)}


@dataclass(frozen=True)
class ShiftedRate(RateFunction):
    """f(t) = base(t) - kappa; absorbs a log-cardinality term."""

    base: RateFunction
    kappa: float

    def evaluate(self, t, bindings=None):
        return scalar_or_array(
            as_float_array(self.base.evaluate(t, bindings)) - self.kappa, t
        )

    def symbols(self):
        return self.base.symbols()

    def substitute(self, bindings):
        return ShiftedRate(self.base.substitute(bindings), self.kappa)

    def to_obj(self):
        return {"form": "shifted", "base": self.base.to_obj(), "kappa": float(self.kappa)}


@dataclass(frozen=True)
class MinRate(RateFunction):
    """f(t) = min(left(t), right(t))."""

    left: RateFunction
    right: RateFunction

    def evaluate(self, t, bindings=None):
        lo = as_float_array(self.left.evaluate(t, bindings))
        hi = as_float_array(self.right.evaluate(t, bindings))
        return scalar_or_array(np.minimum(lo, hi), t)

    def symbols(self):
        return self.left.symbols() | self.right.symbols()

    def substitute(self, bindings):
        return MinRate(self.left.substitute(bindings), self.right.substitute(bindings))

    def to_obj(self):
        return {"form": "min", "left": self.left.to_obj(), "right": self.right.to_obj()}


@dataclass(frozen=True)
class RescaledRate(RateFunction):
    """f(t) = base(t / a)."""

    base: RateFunction
    a: float

    def evaluate(self, t, bindings=None):
        scaled = as_float_array(t) / self.a
        return scalar_or_array(as_float_array(self.base.evaluate(scaled, bindings)), t)

    def symbols(self):
        return self.base.symbols()

    def substitute(self, bindings):
        return RescaledRate(self.base.substitute(bindings), self.a)

    def to_obj(self):
        return {"form": "rescaled", "base": self.base.to_obj(), "a": float(self.a)}


@dataclass(frozen=True)
class ArgPowerRate(RateFunction):
    """f(t) = base(t**exponent), exponent > 0.

    exponent = 1/2 realizes the square-root reparametrization of products;
    exponent = 1/alpha realizes power transforms of the variable.
    """

    base: RateFunction
    exponent: float

    def evaluate(self, t, bindings=None):
        tt = as_float_array(t) ** self.exponent
        return scalar_or_array(
            as_float_array(self.base.evaluate(tt, bindings)), t
        )

    def symbols(self):
        return self.base.symbols()

    def substitute(self, bindings):
        return ArgPowerRate(self.base.substitute(bindings), self.exponent)

    def to_obj(self):
        return {"form": "arg_power", "base": self.base.to_obj(),
                "exponent": float(self.exponent)}


def rate_function_from_obj(obj: dict) -> RateFunction:
    form = obj["form"]
    if form == "log":
        return LogRate()
    if form == "linear":
        return LinearRate(_param_from_obj(obj["c"]))
    if form == "power":
        return PowerRate(_param_from_obj(obj["c"]), float(obj["gamma"]))
    if form == "linear_capped":
        return LinearCappedRate(_param_from_obj(obj["c"]))
    if form == "shifted":
        return ShiftedRate(rate_function_from_obj(obj["base"]), float(obj["kappa"]))
    if form == "min":
        return MinRate(rate_function_from_obj(obj["left"]),
                       rate_function_from_obj(obj["right"]))
    if form == "rescaled":
        return RescaledRate(rate_function_from_obj(obj["base"]), float(obj["a"]))
    if form == "arg_power":
        return ArgPowerRate(rate_function_from_obj(obj["base"]), float(obj["exponent"]))
    raise TailcertError(f"unknown rate function form {form!r}")


def check_rate_function(f: RateFunction, c2: float, grid_points: int = 1000,
                        span: float = 1e6, bindings=None) -> None:
    """Validate the domain invariants on a geometric grid starting at c2:
    non-decreasing, strictly positive, and divergent (probed via
    threshold_above for a level well above f(c2))."""
    grid = np.geomspace(c2, c2 * span, grid_points)
    vals = as_float_array(f.evaluate(grid, bindings))
    if not np.all(np.isfinite(vals)):
        raise TailcertError("rate function not finite on its domain grid")
    if np.any(vals <= 0):
        raise TailcertError("rate function not strictly positive on [C2, inf)")
    if np.any(np.diff(vals) < -1e-12 * np.maximum(1.0, np.abs(vals[:-1]))):
        raise TailcertError("rate function not non-decreasing on [C2, inf)")
    f.threshold_above(float(vals[0]) + 10.0, c2, bindings=bindings)


class LowerRateFunction:
    """Non-increasing positive g on (0, C2] with g(t) -> inf as t -> 0."""

    def evaluate(self, t):
        raise NotImplementedError

    def to_obj(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class NegLogRate(LowerRateFunction):
    """g(t) = -log t."""

    def evaluate(self, t):
        return scalar_or_array(-np.log(as_float_array(t)), t)

    def to_obj(self):
        return {"form": "neg_log"}


@dataclass(frozen=True)
class InversePowerRate(LowerRateFunction):
    """g(t) = c * t**(-gamma)."""

    c: float
    gamma: float

    def evaluate(self, t):
        return scalar_or_array(self.c * as_float_array(t) ** (-self.gamma), t)

    def to_obj(self):
        return {"form": "inverse_power", "c": float(self.c), "gamma": float(self.gamma)}


def lower_rate_function_from_obj(obj: dict) -> LowerRateFunction:
    form = obj["form"]
    if form == "neg_log":
        return NegLogRate()
    if form == "inverse_power":
        return InversePowerRate(float(obj["c"]), float(obj["gamma"]))
    raise TailcertError(f"unknown lower rate function form {form!r}")


def check_lower_rate_function(g: LowerRateFunction, c2: float,
                              grid_points: int = 1000) -> None:
    """Positive, non-increasing on (0, C2], diverging near zero."""
    grid = np.geomspace(c2 * 1e-9, c2, grid_points)
    vals = as_float_array(g.evaluate(grid))
    if np.any(vals <= 0):
        raise TailcertError("lower rate function not positive on (0, C2]")
    if np.any(np.diff(vals) > 1e-12 * np.maximum(1.0, np.abs(vals[:-1]))):
        raise TailcertError("lower rate function not non-increasing")
    if vals[0] < vals[-1] + 10.0:
        raise TailcertError("lower rate function does not diverge near zero")
