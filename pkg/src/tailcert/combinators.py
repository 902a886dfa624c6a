"""Combinator algebra on tail certificates.

Each operation implements an inclusion-of-events argument and records its
exact constant bookkeeping, so outputs are sound certificates for the
combined variable, not just asymptotic statements:

    add       {|X+W| >= t(|Y|+|Z|)}      is contained in
              {|X| >= t|Y|} union {|W| >= t|Z|}
    multiply  {|XW| >= t|YZ|}            is contained in
              {|X| >= sqrt(t)|Y|} union {|W| >= sqrt(t)|Z|}
    power     {|X|^a >= t|Y|^a}          equals {|X| >= t^(1/a)|Y|}
    truncate  P(|X| >= t|Y|) <= P(|Xhat| >= t|Y|) + P(|X| >= |Xhat|)
    max       union bound over a finite index family, the log-cardinality
              absorbed as an additive shift of the exponent
    covering  net maximum plus a self-bounding Lipschitz step, at the price
              of halving the threshold argument
"""
from __future__ import annotations

import numpy as np

from .certificates import (
    DominationEvidence,
    LowerTailCertificate,
    Provenance,
    TailCertificate,
    ThetaCertificate,
    UniformCertificate,
)
from .errors import (
    CardinalityTooLargeError,
    DominationTooWeakError,
    MismatchedSizeOrRateError,
    MissingAssertionError,
    MissingLipschitzAssertionError,
    NonPositiveAlphaError,
    NonPositiveRateError,
    BadModulusError,
    TailcertError,
)
from .ratefn import ArgPowerRate, MinRate, RescaledRate, ShiftedRate
from .sequences import (
    ConstSize,
    CustomSize,
    MinSeq,
    MinSize,
    PowSize,
    ProductSize,
    SizeSequence,
    SumSize,
)
from .util import as_float_array, geomspace_int

DEFAULT_N_SPAN = (1, 10**6, 41)


def default_probe_grid(*seqs, n_start: int = 1) -> np.ndarray:
    """Index grid on which sequence preconditions are checked: geometric
    integers, restricted to where every supplied sequence evaluates finite
    and positive."""
    lo, hi, num = DEFAULT_N_SPAN
    candidates = geomspace_int(max(lo, n_start), hi, num)
    mask = np.ones(len(candidates), dtype=bool)
    for seq in seqs:
        if seq is None:
            continue
        vals = np.empty(len(candidates))
        for i, n in enumerate(candidates):
            try:
                vals[i] = float(seq.evaluate(int(n)))
            except (TailcertError, FloatingPointError):
                vals[i] = np.nan
        mask &= np.isfinite(vals) & (vals > 0)
    usable = candidates[mask]
    if len(usable) < 4:
        raise NonPositiveRateError(
            "no usable probe grid: sequences are not positive on the range"
        )
    return usable


def _min_ceiling(a: TailCertificate, b: TailCertificate):
    if a.ceiling is None and b.ceiling is None:
        return None
    if a.ceiling is None:
        return b.ceiling
    if b.ceiling is None:
        return a.ceiling
    return MinSize(a.ceiling, b.ceiling)


def add(a: TailCertificate, b: TailCertificate) -> TailCertificate:
    """Certificate for X + W against size |Y| + |Z|.

    Constants: c1 adds, C2 and N take maxima, the rate and exponent take
    pointwise minima.  The output keeps flavor O only when both inputs are O
    with the same index threshold; otherwise it is emitted as OHat
    (conservative choice; strengthen_to_all_n recovers O under a
    nonvanishing-size assertion).
    """
    both_o_same_n = (a.flavor == "O" and b.flavor == "O"
                     and a.n_threshold == b.n_threshold)
    flavor = "O" if both_o_same_n else "OHat"
    ceiling = _min_ceiling(a, b)
    if flavor == "O":
        ceiling = None
    return TailCertificate(
        size=SumSize((a.size, b.size)),
        rate=MinSeq(a.rate, b.rate),
        c1=a.c1 + b.c1,
        c2=max(a.c2, b.c2),
        n_threshold=max(a.n_threshold, b.n_threshold),
        f=MinRate(a.f, b.f),
        flavor=flavor,
        ceiling=ceiling,
        provenance=Provenance("add", children=(a.digest(), b.digest())),
    )


def multiply(a: TailCertificate, b: TailCertificate) -> TailCertificate:
    """Certificate for X * W against size Y * Z via the square-root split of
    the threshold: C2 squares and the exponent becomes min(f_a, f_b)(sqrt t)."""
    both_o_same_n = (a.flavor == "O" and b.flavor == "O"
                     and a.n_threshold == b.n_threshold)
    flavor = "O" if both_o_same_n else "OHat"
    ceiling = _min_ceiling(a, b)
    if ceiling is not None:
        ceiling = PowSize(ceiling, 2.0)  # valid for sqrt(t) <= min R_n
    if flavor == "O":
        ceiling = None
    return TailCertificate(
        size=ProductSize((a.size, b.size)),
        rate=MinSeq(a.rate, b.rate),
        c1=a.c1 + b.c1,
        c2=max(a.c2, b.c2) ** 2,
        n_threshold=max(a.n_threshold, b.n_threshold),
        f=ArgPowerRate(MinRate(a.f, b.f), 0.5),
        flavor=flavor,
        ceiling=ceiling,
        provenance=Provenance("multiply", children=(a.digest(), b.digest())),
    )


def power_transform(cert: TailCertificate, alpha: float) -> TailCertificate:
    """Certificate for |X|^alpha against size |Y|^alpha, alpha > 0."""
    if alpha <= 0:
        raise NonPositiveAlphaError(f"alpha must be positive, got {alpha}")
    if alpha == 1.0:
        return cert
    ceiling = None if cert.ceiling is None else PowSize(cert.ceiling, alpha)
    return TailCertificate(
        size=PowSize(cert.size, alpha),
        rate=cert.rate,
        c1=cert.c1,
        c2=cert.c2 ** alpha,
        n_threshold=cert.n_threshold,
        f=ArgPowerRate(cert.f, 1.0 / alpha),
        flavor=cert.flavor,
        ceiling=ceiling,
        provenance=Provenance("power_transform", children=(cert.digest(),),
                              params=(("alpha", float(alpha)),)),
    )


class _ComposedSize(SizeSequence):
    """Size map obtained by composing a scalar function with a base map.
    Not serializable; carries transformed smallness envelopes only."""

    def __init__(self, base, fn):
        self.base = base
        self.fn = fn

    def evaluate(self, n):
        vals = as_float_array(self.base.evaluate(n))
        out = np.vectorize(self.fn, otypes=[float])(vals)
        return float(out) if np.isscalar(n) else out

    def to_obj(self):
        raise TailcertError("composed envelopes do not serialize")


def continuous_transform_o(witness, modulus, probe_grid=None):
    """Push a vanishing witness through a mapping continuous at zero.

    The mapping enters only through a user-supplied modulus of continuity
    omega at 0 (omega nonneg, nondecreasing, omega(0+) = 0); the transformed
    envelope is w'_n = omega(C * w_n) with C the witness threshold constant.
    """
    from .certificates import SmallnessWitness

    if witness.direction != "to_zero":
        raise TailcertError("transform applies to vanishing witnesses only")
    grid = probe_grid if probe_grid is not None else np.geomspace(1e-9, 1.0, 64)
    vals = np.array([float(modulus(d)) for d in grid])
    if np.any(vals < 0):
        raise BadModulusError("modulus takes negative values on the probe grid")
    if np.any(np.diff(vals) < -1e-9 * np.maximum(1.0, vals[:-1])):
        raise BadModulusError("modulus is not non-decreasing on the probe grid")
    if vals[0] > 1e-4:
        raise BadModulusError(
            f"modulus({grid[0]:.1e}) = {vals[0]:.3g} does not vanish at zero"
        )
    c = witness.threshold_c
    return SmallnessWitness(
        w=_ComposedSize(witness.w, lambda x, _c=c: float(modulus(_c * x))),
        direction="to_zero",
        threshold_c=1.0,
    )


def _sup_level_set(f, level: float, t_start: float, t_cap: float = 1e30,
                   bindings=None) -> float:
    """sup{t >= t_start : f(t) <= level} for non-decreasing f; returns
    t_start - 1 when even f(t_start) > level, +inf when f never exceeds
    level below t_cap."""
    if float(f.evaluate(t_start, bindings)) > level:
        return t_start - 1.0
    hi = max(t_start, 1.0)
    while float(f.evaluate(hi, bindings)) <= level:
        hi *= 2.0
        if hi > t_cap:
            return np.inf
    lo = t_start if hi / 2.0 < t_start else hi / 2.0
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        if float(f.evaluate(mid, bindings)) <= level:
            lo = mid
        else:
            hi = mid
    return lo


def truncate(hat_cert: TailCertificate, dom: DominationEvidence,
             n_grid=None) -> TailCertificate:
    """Transfer a certificate from a dominating variable Xhat to X given
    superexponential evidence for P(|X| >= |Xhat|).

    The exception probability p_n is folded into the constant (c1 + 1) on the
    index range where p_n <= exp(-r_n f(t)); the output ceiling caps t at the
    level where that comparison holds, and the threshold N absorbs the burn-in
    until p_n <= exp(-r_n f(C2)).
    """
    if not hat_cert.is_concrete:
        raise TailcertError("truncate requires concrete constants")
    grid = n_grid if n_grid is not None else default_probe_grid(
        hat_cert.rate, n_start=hat_cert.n_threshold)
    grid = np.asarray(sorted(int(n) for n in grid))
    rates_a = as_float_array(hat_cert.rate.evaluate(grid))
    rates_b = as_float_array(dom.rate.evaluate(grid))
    if not np.allclose(rates_a, rates_b, rtol=1e-9):
        raise TailcertError("domination evidence is pinned to a different rate")
    f_c2 = float(hat_cert.f.evaluate(hat_cert.c2))
    ratios = dom.log_ratio(grid)
    ok = ratios >= f_c2
    if not ok.any():
        raise DominationTooWeakError(
            "-log(p_n)/r_n never reaches f(C2) on the probe range"
        )
    # first index from which the comparison holds for the rest of the range
    idx = len(ok) - 1
    while idx > 0 and ok[idx - 1]:
        idx -= 1
    if not ok[idx:].all():
        raise DominationTooWeakError("domination comparison not eventually stable")
    n_new = max(hat_cert.n_threshold, int(grid[idx]))

    # ceiling: largest t with f(t) <= -log(p_n)/r_n, capped by the input ceiling
    levels = ratios[idx:]
    caps = np.empty(len(levels))
    for i, lev in enumerate(levels):
        caps[i] = (np.inf if np.isinf(lev)
                   else _sup_level_set(hat_cert.f, float(lev), hat_cert.c2))
    if np.all(np.isinf(caps)):
        ceiling = hat_cert.ceiling
    elif np.allclose(caps[np.isfinite(caps)],
                     caps[np.isfinite(caps)][0], rtol=1e-9) and np.isfinite(caps).all():
        const_cap = ConstSize(float(caps[0]))
        ceiling = const_cap if hat_cert.ceiling is None \
            else MinSize(hat_cert.ceiling, const_cap)
    else:
        finite = np.where(np.isfinite(caps), caps, 1e30)
        table = CustomSize(tuple((int(n), float(v))
                                 for n, v in zip(grid[idx:], finite)))
        ceiling = table if hat_cert.ceiling is None \
            else MinSize(hat_cert.ceiling, table)
    return TailCertificate(
        size=hat_cert.size,
        rate=hat_cert.rate,
        c1=hat_cert.c1 + 1.0,
        c2=hat_cert.c2,
        n_threshold=n_new,
        f=hat_cert.f,
        flavor="OHat",
        ceiling=ceiling,
        provenance=Provenance("truncate", children=(hat_cert.digest(),)),
    )


def strengthen_to_all_n(cert: TailCertificate,
                        size_never_zero: bool = False) -> TailCertificate:
    """Coerce an OHat certificate to an O certificate valid from n = 1,
    under the caller's declaration that P(Y_n = 0) = 0.

    The numeric constants are kept; the provenance records that finitely many
    small-n indices are absorbed by enlarging the threshold constant, which
    exists by maximizing over n below the old threshold."""
    if not size_never_zero:
        raise MissingAssertionError(
            "strengthening requires the declared property P(Y_n = 0) = 0"
        )
    if cert.flavor == "O" and cert.n_threshold == 1:
        return cert
    return TailCertificate(
        size=cert.size,
        rate=cert.rate,
        c1=cert.c1,
        c2=cert.c2,
        n_threshold=1,
        f=cert.f,
        flavor="O",
        ceiling=None,
        provenance=Provenance(
            "strengthen_to_all_n", children=(cert.digest(),),
            note=("small-n indices absorbed: a finite threshold constant "
                  "exists by maximization over n below the old threshold; "
                  "numeric C2 kept unchanged"),
        ),
    )


def finite_max(u: UniformCertificate, kappa: float,
               n_grid=None) -> TailCertificate:
    """Certificate for the maximum over a finite index family via the union
    bound: the exponent is shifted down by kappa >= log|Lambda_n| / r_n and
    C2 moves up to where the shifted exponent clears one."""
    if kappa < 0:
        raise TailcertError("kappa must be nonnegative")
    grid = n_grid if n_grid is not None else default_probe_grid(
        u.rate, u.index_family.cardinality, n_start=u.n_threshold)
    logcard = u.index_family.log_cardinality(grid)
    rates = as_float_array(u.rate.evaluate(grid))
    if np.any(logcard > kappa * rates * (1 + 1e-12)):
        raise CardinalityTooLargeError(
            "log-cardinality exceeds kappa * r_n on the probe range"
        )
    try:
        c2_new = u.f.threshold_above(kappa + 1.0, t_start=u.c2)
    except TailcertError as exc:
        raise CardinalityTooLargeError(
            f"no threshold in the search window clears the shift: {exc}"
        ) from exc
    if u.per_index_sizes is not None:
        size = SumSize(tuple(u.per_index_sizes))
    else:
        size = u.size
    return TailCertificate(
        size=size,
        rate=u.rate,
        c1=u.c1,
        c2=float(c2_new),
        n_threshold=u.n_threshold,
        f=ShiftedRate(u.f, float(kappa)),
        flavor="O",
        ceiling=None,
        provenance=Provenance("finite_max", children=(u.digest(),),
                              params=(("kappa", float(kappa)),)),
    )


def covering_supremum(net_cert: UniformCertificate, kappa: float,
                      lip_cert: TailCertificate | None, eps: SizeSequence,
                      lipschitz_asserted: bool = False,
                      n_grid=None) -> TailCertificate:
    """Certificate for the supremum of a process over a continuously indexed
    set, from a uniform certificate on an eps-net plus a Lipschitz control.

    The caller asserts the self-bounding hypothesis: increments are bounded
    by (sup/(2 eps_n) + M_n) times the distance.  lip_cert certifies M_n
    against size Z_n; pass None when M_n = 0 (pure self-bounding processes,
    e.g. quadratic forms with eps <= 1/4), in which case the Z-term
    degenerates to zero size.  Absorbing the self-bounded half of the
    supremum costs a factor 2 in the threshold: the exponent becomes the
    post-union min(f - kappa, g) evaluated at t/2, C2 doubles, and c1 becomes
    twice the larger input constant.
    """
    if not lipschitz_asserted:
        raise MissingLipschitzAssertionError(
            "caller must assert the self-bounding Lipschitz hypothesis"
        )
    maxnet = finite_max(net_cert, kappa, n_grid=n_grid)
    if lip_cert is None:
        size = SumSize((maxnet.size, ProductSize((eps, ConstSize(0.0)))))
        return TailCertificate(
            size=size,
            rate=maxnet.rate,
            c1=2.0 * maxnet.c1,
            c2=2.0 * maxnet.c2,
            n_threshold=maxnet.n_threshold,
            f=RescaledRate(maxnet.f, 2.0),
            flavor="O",
            ceiling=None,
            provenance=Provenance(
                "covering_supremum", children=(net_cert.digest(),),
                params=(("kappa", float(kappa)), ("lipschitz", "zero")),
            ),
        )
    size = SumSize((maxnet.size, ProductSize((eps, lip_cert.size))))
    flavor = "O" if lip_cert.flavor == "O" else "OHat"
    ceiling = None
    if lip_cert.ceiling is not None:
        ceiling = ProductSize((ConstSize(2.0), lip_cert.ceiling))
    if flavor == "O":
        ceiling = None
    return TailCertificate(
        size=size,
        rate=MinSeq(maxnet.rate, lip_cert.rate),
        c1=2.0 * max(maxnet.c1, lip_cert.c1),
        c2=2.0 * max(maxnet.c2, lip_cert.c2),
        n_threshold=max(maxnet.n_threshold, lip_cert.n_threshold),
        f=RescaledRate(MinRate(maxnet.f, lip_cert.f), 2.0),
        flavor=flavor,
        ceiling=ceiling,
        provenance=Provenance(
            "covering_supremum",
            children=(net_cert.digest(), lip_cert.digest()),
            params=(("kappa", float(kappa)),),
        ),
    )


def theta_pair(upper: TailCertificate, lower: LowerTailCertificate,
               n_grid=None) -> ThetaCertificate:
    """Bundle matching upper and lower certificates into a two-sided record.
    Size and rate must agree, compared by evaluation on the probe grid."""
    grid = n_grid if n_grid is not None else default_probe_grid(
        upper.rate, lower.rate,
        n_start=max(upper.n_threshold, lower.n_threshold))
    su = as_float_array(upper.size.evaluate(grid))
    sl = as_float_array(lower.size.evaluate(grid))
    ru = as_float_array(upper.rate.evaluate(grid))
    rl = as_float_array(lower.rate.evaluate(grid))
    if not (np.allclose(su, sl, rtol=1e-9) and np.allclose(ru, rl, rtol=1e-9)):
        raise MismatchedSizeOrRateError(
            "upper and lower certificates disagree in size or rate"
        )
    return ThetaCertificate(
        upper=upper, lower=lower,
        provenance=Provenance("theta_pair",
                              children=(upper.digest(), lower.digest())),
    )
