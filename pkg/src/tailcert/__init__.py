"""tailcert: executable tail-bound certificates.

A TailCertificate records P(|X_n| >= t|Y_n|) <= c1 exp(-r_n f(t)) with
explicit constants, a combinator algebra propagates such records through
sums, products, transforms, truncations and suprema, a catalog constructs
them from moment and psi-norm hypotheses, and a Monte Carlo verifier checks
them against empirical tails with exact binomial confidence limits.
"""
from .certificates import (
    DominationEvidence,
    IndexFamily,
    LowerTailCertificate,
    Provenance,
    SmallnessWitness,
    TailCertificate,
    ThetaCertificate,
    UniformCertificate,
    eval_bound,
)
from .combinators import (
    add,
    continuous_transform_o,
    covering_supremum,
    finite_max,
    multiply,
    power_transform,
    strengthen_to_all_n,
    theta_pair,
    truncate,
)
from .catalog import (
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
from .verify import (
    EmpiricalTail,
    TailProbe,
    Verdict,
    check_certificate,
    clopper_pearson_upper,
    estimate_tail,
    exact_tail,
    fit_constants,
    little_o_diagnostic,
    rate_diagnostic,
)
from .nets import (
    BallSpec,
    CoverageReport,
    Net,
    ProductSpec,
    SphereSpec,
    StopRule,
    build_net,
    product_net,
    verify_covering,
    verify_separation,
)

__version__ = "0.1.0"
