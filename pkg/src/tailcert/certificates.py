"""Certificate types.

A TailCertificate is the machine-checkable record

    P(|X_n| >= t * |Y_n|) <= c1 * exp(-r_n * f(t))   for n >= N, t >= C2,

with an optional per-index ceiling R_n (flavor "OHat") restricting the valid
thresholds to C2 <= t <= R_n.  LowerTailCertificate is the analogue for
P(X_n <= t * Y_n) on 0 < t <= C2 with a non-increasing exponent g.  All types
are immutable values; combinators return new records and stamp a provenance
tree (operation name plus child digests) for audit.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import (
    OutOfDomainError,
    SymbolicConstantsError,
    TailcertError,
)
from .ratefn import (
    LowerRateFunction,
    RateFunction,
    lower_rate_function_from_obj,
    rate_function_from_obj,
)
from .sequences import (
    RateSequence,
    SizeSequence,
    rate_sequence_from_obj,
    size_sequence_from_obj,
)
from .util import as_float_array, digest

CONCRETE = "concrete"


@dataclass(frozen=True)
class Provenance:
    """Combinator-tree record: operation name, child digests, free-form note."""

    op: str
    children: tuple = ()
    params: tuple = ()  # tuple of (key, value) pairs, JSON-safe values
    note: str = ""

    def to_obj(self):
        return {
            "op": self.op,
            "children": list(self.children),
            "params": [[k, v] for k, v in self.params],
            "note": self.note,
        }

    @staticmethod
    def from_obj(obj):
        return Provenance(
            op=obj["op"],
            children=tuple(obj.get("children", ())),
            params=tuple((k, v) for k, v in obj.get("params", ())),
            note=obj.get("note", ""),
        )


def _constants_status_obj(status):
    if status == CONCRETE:
        return CONCRETE
    return {"unknown_positive": sorted(status)}


def _constants_status_from_obj(obj):
    if obj == CONCRETE:
        return CONCRETE
    return tuple(sorted(obj["unknown_positive"]))


@dataclass(frozen=True)
class TailCertificate:
    size: SizeSequence
    rate: RateSequence
    c1: float
    c2: float
    n_threshold: int
    f: RateFunction
    flavor: str = "O"  # "O" or "OHat"
    ceiling: SizeSequence | None = None  # R_n map, required semantics for OHat
    provenance: Provenance = field(default_factory=lambda: Provenance("declared"))

    def __post_init__(self):
        if self.c1 <= 0 or self.c2 <= 0:
            raise TailcertError("c1 and c2 must be positive")
        if self.n_threshold < 1:
            raise TailcertError("n_threshold must be >= 1")
        if self.flavor not in ("O", "OHat"):
            raise TailcertError(f"unknown flavor {self.flavor!r}")
        if self.flavor == "O" and self.ceiling is not None:
            raise TailcertError("flavor O carries no ceiling")
        if self.is_concrete and float(self.f.evaluate(self.c2)) <= 0:
            raise TailcertError("f must be positive at C2")

    @property
    def constants_status(self):
        syms = self.f.symbols()
        return CONCRETE if not syms else tuple(sorted(syms))

    @property
    def is_concrete(self) -> bool:
        return self.constants_status == CONCRETE

    def with_constants(self, bindings: dict) -> "TailCertificate":
        """Substitute symbolic constants; result must be fully concrete."""
        out = replace(self, f=self.f.substitute(bindings))
        if not out.is_concrete:
            missing = set(out.constants_status)
            raise SymbolicConstantsError(f"unbound constants remain: {missing}")
        return out

    def eval_bound(self, n, t, bindings=None):
        return eval_bound(self, n, t, bindings=bindings)

    def in_domain(self, n, t) -> np.ndarray:
        """Vectorized domain test (n >= N, C2 <= t <= R_n)."""
        nn, tt = np.broadcast_arrays(as_float_array(n), as_float_array(t))
        ok = (nn >= self.n_threshold) & (tt >= self.c2)
        if self.ceiling is not None:
            ok &= tt <= as_float_array(self.ceiling.evaluate(nn))
        return ok

    def validate_ceiling(self, n_grid, level: float) -> bool:
        """OHat ceilings must tend to infinity: R_n >= level for all large n
        in the evaluation range."""
        if self.ceiling is None:
            return True
        vals = as_float_array(self.ceiling.evaluate(np.sort(as_float_array(n_grid))))
        return bool(np.all(vals[-1] >= level))

    def to_document(self) -> dict:
        return {
            "kind": "tail_certificate",
            "size": self.size.to_obj(),
            "rate": self.rate.to_obj(),
            "c1": float(self.c1),
            "c2": float(self.c2),
            "n_threshold": int(self.n_threshold),
            "f": self.f.to_obj(),
            "flavor": self.flavor,
            "ceiling": None if self.ceiling is None else self.ceiling.to_obj(),
            "constants_status": _constants_status_obj(self.constants_status),
            "provenance": self.provenance.to_obj(),
        }

    @staticmethod
    def from_document(doc: dict) -> "TailCertificate":
        cert = TailCertificate(
            size=size_sequence_from_obj(doc["size"]),
            rate=rate_sequence_from_obj(doc["rate"]),
            c1=float(doc["c1"]),
            c2=float(doc["c2"]),
            n_threshold=int(doc["n_threshold"]),
            f=rate_function_from_obj(doc["f"]),
            flavor=doc["flavor"],
            ceiling=None if doc.get("ceiling") is None
            else size_sequence_from_obj(doc["ceiling"]),
            provenance=Provenance.from_obj(doc["provenance"]),
        )
        recorded = _constants_status_from_obj(doc["constants_status"])
        if recorded != cert.constants_status:
            raise TailcertError("constants_status does not match the f symbols")
        return cert

    def digest(self) -> str:
        return digest(self.to_document())


def eval_bound(cert: TailCertificate, n, t, bindings=None):
    """Numeric tail bound c1 * exp(-r_n * f(t)) at (n, t).

    Raises OutOfDomainError off the certificate's domain and
    SymbolicConstantsError when constants are unfitted and no bindings are
    supplied.  Scalar in, scalar out; arrays broadcast.
    """
    if not cert.is_concrete and not bindings:
        raise SymbolicConstantsError(
            f"certificate carries symbolic constants {cert.constants_status}"
        )
    nn, tt = np.broadcast_arrays(as_float_array(n), as_float_array(t))
    if np.any(nn < cert.n_threshold):
        raise OutOfDomainError(f"n below certificate threshold {cert.n_threshold}")
    if np.any(tt < cert.c2 * (1 - 1e-12)):
        raise OutOfDomainError(f"t below certificate C2={cert.c2}")
    if cert.ceiling is not None:
        caps = as_float_array(cert.ceiling.evaluate(nn))
        if np.any(tt > caps * (1 + 1e-12)):
            raise OutOfDomainError("t above certificate ceiling R_n")
    r = as_float_array(cert.rate.evaluate(nn))
    fv = as_float_array(cert.f.evaluate(tt, bindings))
    out = cert.c1 * np.exp(-r * fv)
    if np.isscalar(n) and np.isscalar(t):
        return float(out)
    return out


@dataclass(frozen=True)
class IndexFamily:
    """Per-n finite index set description: a label plus a cardinality map."""

    label: str
    cardinality: SizeSequence

    def log_cardinality(self, n):
        return np.log(as_float_array(self.cardinality.evaluate(n)))

    def to_obj(self):
        return {"label": self.label, "cardinality": self.cardinality.to_obj()}

    @staticmethod
    def from_obj(obj):
        return IndexFamily(obj["label"], size_sequence_from_obj(obj["cardinality"]))


@dataclass(frozen=True)
class UniformCertificate:
    """A tail certificate holding simultaneously for every index of a finite
    family, with shared constants and rate function.  Per-index sizes are
    supported as an explicit tuple for fixed-cardinality families; otherwise
    the shared size applies to every index."""

    index_family: IndexFamily
    size: SizeSequence
    rate: RateSequence
    c1: float
    c2: float
    n_threshold: int
    f: RateFunction
    per_index_sizes: tuple | None = None
    provenance: Provenance = field(default_factory=lambda: Provenance("declared"))

    def __post_init__(self):
        if self.c1 <= 0 or self.c2 <= 0 or self.n_threshold < 1:
            raise TailcertError("invalid constants for uniform certificate")

    def member(self) -> TailCertificate:
        """The certificate satisfied by each single index."""
        return TailCertificate(
            size=self.size, rate=self.rate, c1=self.c1, c2=self.c2,
            n_threshold=self.n_threshold, f=self.f,
            provenance=Provenance("uniform_member",
                                  children=(self.digest(),)),
        )

    def to_document(self) -> dict:
        return {
            "kind": "uniform_certificate",
            "index_family": self.index_family.to_obj(),
            "size": self.size.to_obj(),
            "rate": self.rate.to_obj(),
            "c1": float(self.c1),
            "c2": float(self.c2),
            "n_threshold": int(self.n_threshold),
            "f": self.f.to_obj(),
            "per_index_sizes": None if self.per_index_sizes is None
            else [s.to_obj() for s in self.per_index_sizes],
            "provenance": self.provenance.to_obj(),
        }

    @staticmethod
    def from_document(doc: dict) -> "UniformCertificate":
        return UniformCertificate(
            index_family=IndexFamily.from_obj(doc["index_family"]),
            size=size_sequence_from_obj(doc["size"]),
            rate=rate_sequence_from_obj(doc["rate"]),
            c1=float(doc["c1"]),
            c2=float(doc["c2"]),
            n_threshold=int(doc["n_threshold"]),
            f=rate_function_from_obj(doc["f"]),
            per_index_sizes=None if doc.get("per_index_sizes") is None
            else tuple(size_sequence_from_obj(s) for s in doc["per_index_sizes"]),
            provenance=Provenance.from_obj(doc["provenance"]),
        )

    def digest(self) -> str:
        return digest(self.to_document())


@dataclass(frozen=True)
class LowerTailCertificate:
    """P(X_n <= t * Y_n) <= c1 * exp(-r_n * g(t)) for n >= N, 0 < t <= C2."""

    size: SizeSequence
    rate: RateSequence
    c1: float
    c2: float
    n_threshold: int
    g: LowerRateFunction
    provenance: Provenance = field(default_factory=lambda: Provenance("declared"))

    def __post_init__(self):
        if self.c1 <= 0 or self.c2 <= 0 or self.n_threshold < 1:
            raise TailcertError("invalid constants for lower tail certificate")

    def eval_bound(self, n, t):
        nn, tt = np.broadcast_arrays(as_float_array(n), as_float_array(t))
        if np.any(nn < self.n_threshold):
            raise OutOfDomainError("n below threshold")
        if np.any(tt <= 0) or np.any(tt > self.c2 * (1 + 1e-12)):
            raise OutOfDomainError("t outside (0, C2]")
        r = as_float_array(self.rate.evaluate(nn))
        out = self.c1 * np.exp(-r * as_float_array(self.g.evaluate(tt)))
        if np.isscalar(n) and np.isscalar(t):
            return float(out)
        return out

    def to_document(self) -> dict:
        return {
            "kind": "lower_tail_certificate",
            "size": self.size.to_obj(),
            "rate": self.rate.to_obj(),
            "c1": float(self.c1),
            "c2": float(self.c2),
            "n_threshold": int(self.n_threshold),
            "f": self.g.to_obj(),
            "flavor": "Omega",
            "ceiling": None,
            "constants_status": CONCRETE,
            "provenance": self.provenance.to_obj(),
        }

    @staticmethod
    def from_document(doc: dict) -> "LowerTailCertificate":
        return LowerTailCertificate(
            size=size_sequence_from_obj(doc["size"]),
            rate=rate_sequence_from_obj(doc["rate"]),
            c1=float(doc["c1"]),
            c2=float(doc["c2"]),
            n_threshold=int(doc["n_threshold"]),
            g=lower_rate_function_from_obj(doc["f"]),
            provenance=Provenance.from_obj(doc["provenance"]),
        )

    def digest(self) -> str:
        return digest(self.to_document())


@dataclass(frozen=True)
class SmallnessWitness:
    """Deterministic envelope w_n certifying a vanishing (or exploding)
    normalized variable; threshold_c is the threshold constant of the
    underlying certificate, used by continuity transforms."""

    w: SizeSequence
    direction: str  # "to_zero" or "to_infinity"
    threshold_c: float = 1.0

    def __post_init__(self):
        if self.direction not in ("to_zero", "to_infinity"):
            raise TailcertError(f"unknown direction {self.direction!r}")

    def validate_trend(self, n_grid) -> None:
        vals = as_float_array(self.w.evaluate(np.sort(as_float_array(n_grid))))
        if np.any(vals < 0):
            raise TailcertError("witness envelope must be nonnegative")
        if self.direction == "to_zero":
            if not vals[-1] <= vals[0] * 0.5:
                raise TailcertError("witness envelope does not trend to zero")
        else:
            if not vals[-1] >= vals[0] * 2.0:
                raise TailcertError("witness envelope does not trend to infinity")

    def to_obj(self):
        return {"w": self.w.to_obj(), "direction": self.direction,
                "threshold_c": float(self.threshold_c)}


class DominationEvidence:
    """Superexponentially small exception probability p_n = P(|X_n| >= |Xhat_n|)
    relative to a rate sequence: -log(p_n)/r_n -> infinity."""

    def __init__(self, p, rate: RateSequence):
        self._p = p  # callable n -> probability, or object with .evaluate
        self.rate = rate

    def p_value(self, n):
        fn = getattr(self._p, "evaluate", self._p)
        vals = as_float_array(fn(as_float_array(n)))
        if np.any(vals < 0) or np.any(vals > 1):
            raise TailcertError("domination probabilities must lie in [0, 1]")
        return vals

    def log_ratio(self, n):
        """-log(p_n) / r_n with p_n = 0 mapping to +inf."""
        p = self.p_value(n)
        r = as_float_array(self.rate.evaluate(n))
        with np.errstate(divide="ignore"):
            return np.where(p == 0, np.inf, -np.log(np.maximum(p, 1e-320)) / r)

    def check_superexponential(self, n_grid, level: float) -> None:
        ratios = self.log_ratio(np.sort(as_float_array(n_grid)))
        if not ratios[-1] >= level:
            raise TailcertError(
                f"-log(p_n)/r_n reaches only {ratios[-1]:.3g} < {level:.3g} "
                "on the probe range"
            )


@dataclass(frozen=True)
class ThetaCertificate:
    """Two-sided pairing: matched upper and lower tail certificates."""

    upper: TailCertificate
    lower: LowerTailCertificate
    provenance: Provenance = field(default_factory=lambda: Provenance("theta_pair"))

    def to_document(self) -> dict:
        return {
            "kind": "theta_certificate",
            "upper": self.upper.to_document(),
            "lower": self.lower.to_document(),
            "provenance": self.provenance.to_obj(),
        }

    def digest(self) -> str:
        return digest(self.to_document())
