import math

import numpy as np
import pytest
from scipy import integrate, stats

from tailcert import (
    MomentHypothesis,
    PsiNormHypothesis,
    from_moment_bound,
    from_psi_norm,
    gaussian_mean_cert,
    linf_norm_cert,
    lp_norm_cert,
    psi_linf_norm_cert,
    psi_lp_norm_cert,
    sample_mean_cert,
    subgaussian_l2_cert,
)
from tailcert.errors import (
    BadAlphaError,
    RateBelowDimensionError,
    RateBelowOneError,
    RateTooSmallError,
    TailcertError,
)
from tailcert.sequences import ConstSeq, ConstSize, LinearNSeq, LogNSeq

from oracles import DiscretePair, assert_dominates, default_grid


def test_moment_bound_exponential_oracle():
    # X ~ Exp(1), moment order r: E X^r = Gamma(r+1), size (r!)^(1/r);
    # the exact tail exp(-t Y) sits below the Markov bound t^{-r} on t >= e
    r = 3.0
    y = math.exp(math.lgamma(r + 1.0) / r)
    h = MomentHypothesis(order=ConstSeq(r), bound=ConstSize(y))
    cert = from_moment_bound(h)
    assert cert.c1 == 1.0 and cert.c2 == math.e
    for t in np.geomspace(math.e, 40.0, 12):
        exact = math.exp(-t * y)
        assert exact <= float(cert.eval_bound(1, t)) + 1e-15


def test_moment_bound_point_mass():
    # deterministic X = y: exact tail vanishes beyond t = 1
    pair = DiscretePair((2.0,), (2.0,), (1.0,))
    h = MomentHypothesis(order=ConstSeq(2.0), bound=ConstSize(2.0))
    cert = from_moment_bound(h)
    assert_dominates(cert, pair, default_grid(cert))


def test_moment_bound_chebyshev_shape():
    # r = 2 reproduces the t^{-2} Chebyshev-type decay
    h = MomentHypothesis(order=ConstSeq(2.0), bound=ConstSize(1.0))
    cert = from_moment_bound(h)
    for t in (math.e, 5.0, 9.0):
        assert float(cert.eval_bound(1, t)) == pytest.approx(t ** -2.0)


def test_moment_bound_markov_equality_point():
    # two-atom law that makes Markov an equality at one threshold:
    # X in {0, s} with P(X = s) = (y/s)^r attains E X^r = y^r and
    # P(X >= t y) = (y/s)^r = (ty)^{-r} E X^r at t = s/y
    r, y, s = 2.0, 1.0, 4.0
    p = (y / s) ** r
    pair = DiscretePair((s, 0.0), (y, y), (p, 1 - p))
    h = MomentHypothesis(order=ConstSeq(r), bound=ConstSize(y))
    cert = from_moment_bound(h)
    t_star = s / y
    assert pair.exact_tail(t_star) == pytest.approx(
        float(cert.eval_bound(1, t_star)), rel=1e-12)
    assert_dominates(cert, pair, default_grid(cert))


def test_lp_and_linf_certificates():
    order = LogNSeq(2.0)
    table = tuple((n, math.exp(math.lgamma(float(order.evaluate(n)) + 1)
                               / float(order.evaluate(n))))
                  for n in (10, 100, 1000))
    from tailcert.sequences import CustomSize

    h = MomentHypothesis(order=order, bound=CustomSize(table))
    grid = [10, 100, 1000]
    lp = lp_norm_cert(h, n_grid=grid)
    linf = linf_norm_cert(h, 2.0, n_grid=grid)
    # consistency: sizes differ by exactly n^(1/r_n) = e^(1/c)
    for n in grid:
        ratio = float(linf.size.evaluate(n)) / float(lp.size.evaluate(n))
        assert ratio == pytest.approx(1.0, rel=1e-12)  # e^{1/c} / n^{1/(c log n)}
    with pytest.raises(RateTooSmallError):
        linf_norm_cert(h, 5.0, n_grid=grid)  # r_n = 2 log n < 5 log n


def test_linf_exact_max_cdf_oracle():
    # iid Exp(1) coordinates, n = 1000, r_n = 2 log n: exact sup-norm tail
    n = 1000
    c = 2.0
    r = c * math.log(n)
    y = math.exp(math.lgamma(r + 1.0) / r)
    from tailcert.sequences import CustomSize

    h = MomentHypothesis(order=LogNSeq(c), bound=CustomSize(((n, y),)))
    cert = linf_norm_cert(h, c, n_grid=[n])
    for t in np.geomspace(cert.c2, 8.0, 8):
        s = t * float(cert.size.evaluate(n))
        exact = 1.0 - (1.0 - math.exp(-s)) ** n
        assert exact <= float(cert.eval_bound(n, t)) * (1 + 1e-12)


def test_psi_norm_certificates():
    h = PsiNormHypothesis(alpha=2.0)
    cert = from_psi_norm(h, ConstSeq(4.0))
    assert float(cert.size.evaluate(1)) == pytest.approx(2.0)  # 4^(1/2)
    with pytest.raises(RateBelowOneError):
        from_psi_norm(h, ConstSeq(0.5))
    with pytest.raises(TailcertError):
        PsiNormHypothesis(alpha=2.0, norm_bound=1.5)
    with pytest.raises(BadAlphaError):
        PsiNormHypothesis(alpha=0.5)


def test_psi_tail_exact_gaussian_oracle():
    # alpha = 2, standard normal scaled to unit psi2 norm, rate 4:
    # empirical tail P(|X| >= t * 4^(1/2)) = 2 Phibar(2 t psi2) under bound
    from tailcert.samplers import GaussianSpec, psi_norm

    psi2 = psi_norm(GaussianSpec(0.0, 1.0), 2.0).value
    h = PsiNormHypothesis(alpha=2.0)
    cert = from_psi_norm(h, ConstSeq(4.0))
    for t in (math.e, 4.0, 8.0):
        exact = 2.0 * stats.norm.sf(t * 2.0 * psi2)
        assert exact <= float(cert.eval_bound(1, t)) + 1e-15


def test_psi_tail_exact_exponential_oracle():
    from tailcert.samplers import ExponentialSpec, psi_norm

    spec = ExponentialSpec(1.0, centered=False)
    psi1 = psi_norm(spec, 1.0).value
    h = PsiNormHypothesis(alpha=1.0)
    cert = from_psi_norm(h, ConstSeq(4.0))
    for t in (math.e, 4.0, 8.0):
        # X/psi1 with X ~ Exp(1): P(X/psi1 >= t * 4) = exp(-4 t psi1)
        exact = math.exp(-t * 4.0 * psi1)
        assert exact <= float(cert.eval_bound(1, t)) + 1e-15


def test_psi_rate_one_reduces_to_first_moment():
    h = PsiNormHypothesis(alpha=2.0)
    cert = from_psi_norm(h, ConstSeq(1.0))
    assert float(cert.size.evaluate(1)) == pytest.approx(1.0)


def test_psi_vector_certificates():
    h = PsiNormHypothesis(alpha=2.0, per_coordinate=True)
    lp = psi_lp_norm_cert(h, LogNSeq(2.0), n_grid=[10, 100])
    linf = psi_linf_norm_cert(h, LogNSeq(2.0), 2.0, n_grid=[10, 100])
    for n in (10, 100):
        assert float(linf.size.evaluate(n)) == pytest.approx(
            float(lp.size.evaluate(n)), rel=1e-12)
    with pytest.raises(RateTooSmallError):
        psi_linf_norm_cert(h, LogNSeq(2.0), 3.0, n_grid=[10, 100])


def test_subgaussian_l2_shape_and_precondition():
    cert = subgaussian_l2_cert(ConstSize(1.0), ConstSeq(4.0), n_grid=[1, 10])
    assert cert.constants_status == ("subgaussian_l2_c",)
    assert float(cert.size.evaluate(1)) == pytest.approx(2.0)
    with pytest.raises(RateBelowDimensionError):
        subgaussian_l2_cert(ConstSize(10.0), ConstSeq(5.0), dim_constant=1.0,
                            n_grid=[1, 10])


def test_sample_mean_shapes():
    a1 = sample_mean_cert(1, LogNSeq(1.0))
    assert a1.c1 == 2.0 and a1.c2 == 1.0
    assert float(a1.rate.evaluate(4)) == pytest.approx(min(math.log(4), 4.0))
    a2 = sample_mean_cert(2, LogNSeq(1.0))
    assert a2.c1 == math.e and a2.c2 == 1.0
    assert float(a2.rate.evaluate(4)) == pytest.approx(math.log(4))
    with pytest.raises(BadAlphaError):
        sample_mean_cert(3, LogNSeq(1.0))
    # n = 1 at unit rate: size reduces to the per-summand scale
    assert float(sample_mean_cert(2, ConstSeq(1.0)).size.evaluate(1)) == 1.0


def test_gaussian_mean_exact_dominates():
    cert = gaussian_mean_cert(ConstSeq(1.0))
    # single normal at t = 2: exact 2 Phibar(2) under 2 e^{-2}
    assert 2 * stats.norm.sf(2.0) <= float(cert.eval_bound(1, 2.0))
    assert float(cert.eval_bound(1, 2.0)) == pytest.approx(2 * math.exp(-2.0))


def test_gaussian_mean_dominates_exact_grid():
    # every (n, t) with n <= 10^4 and 1 <= t <= 6, r_n = log n
    cert = gaussian_mean_cert(LogNSeq(1.0))
    for n in (10, 100, 1000, 10 ** 4):
        r = math.log(n)
        for t in np.linspace(1.0, 6.0, 26):
            exact = 2.0 * stats.norm.sf(t * math.sqrt(r))
            assert exact <= float(cert.eval_bound(n, t)) * (1 + 1e-12)


def test_gaussian_mean_tail_inequality_at_threshold():
    # at t = C2 = 1 the bound 2 exp(-r/2) dominates 2 Phibar(sqrt r) for all r
    cert = gaussian_mean_cert(ConstSeq(1.0))
    for r in (0.5, 1.0, 4.0, 9.0):
        c = gaussian_mean_cert(ConstSeq(r))
        assert 2 * stats.norm.sf(math.sqrt(r)) <= float(c.eval_bound(1, 1.0))


def test_hypothesis_documents_round_trip():
    h = MomentHypothesis(order=ConstSeq(3.0), bound=ConstSize(1.5))
    back = MomentHypothesis.from_document(h.to_document())
    assert float(back.order.evaluate(9)) == 3.0
    assert float(back.bound.evaluate(9)) == 1.5
    p = PsiNormHypothesis(alpha=2.0, norm_bound=0.9, per_coordinate=True,
                          dimension=ConstSize(4.0))
    back2 = PsiNormHypothesis.from_document(p.to_document())
    assert back2.alpha == 2.0 and back2.per_coordinate
    assert float(back2.dimension.evaluate(1)) == 4.0


def test_subgaussian_l2_dimension_one_reduces_to_scalar():
    from tailcert.sequences import PowerOfRateSize

    cert = subgaussian_l2_cert(ConstSize(1.0), ConstSeq(4.0), n_grid=[1, 10])
    scalar = from_psi_norm(PsiNormHypothesis(alpha=2.0), ConstSeq(4.0))
    for n in (1, 10):
        assert float(cert.size.evaluate(n)) == float(scalar.size.evaluate(n))
