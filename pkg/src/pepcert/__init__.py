"""Construction and independent verification of low-rank worst-case
certificates for gradient descent with the rate-balancing constant stepsize.

The library is organized around five pieces:

- `rates`: the stepsize/rate pair (alpha(N), r(N)), closed-form worst cases,
  exact 1-D simulations, and the lower-bound envelope.
- `recursion`: derivation of the certificate data (a, b, c) and residuals eps
  from the free vector d.
- `solver`: damped Gauss-Newton on the overdetermined residual system, with
  warm-started continuation sweeps over N.
- `verifier`: symbolic aggregation of the interpolation inequalities against
  the target rate expression, structural multiplier checks, and the
  delta-certificate rate bound.
- `certfile`/`cli`: the pepcert/1 file format and command-line front end.
"""

from .certfile import (
    FORMAT_TAG,
    CertificateFile,
    CertificateFormatError,
    certificate_from_report,
    default_path,
    params_from_file,
    parse_certificate,
    read_certificate,
    render_certificate,
    write_certificate,
)
from .rates import (
    BALANCE_TOL,
    ObjectiveKind,
    ObjectiveSpec,
    RateParams,
    SimTrace,
    huber_rate,
    lower_bound_envelope,
    quadratic_rate,
    simulate,
    solve_rate_params,
    solve_rate_params_mp,
)
from .recursion import (
    CertParams,
    FullCertificate,
    ab_from_cd,
    c_from_d,
    derive_full,
    eps_from,
    residual,
)
from .solver import (
    NonConvergence,
    RankDeficientJacobian,
    SolveReport,
    SweepSchedule,
    bootstrap_smallest,
    extrapolate_init,
    gauss_newton,
    jacobian,
    least_squares_step,
    resample,
    sweep,
)
from .verifier import (
    STAR,
    LambdaMatrix,
    QuadraticAggregate,
    aggregate,
    assemble_lambda,
    check_delta_certificate,
    oracle_check,
    oracle_scale,
    q_form,
    rhs_with_errors,
    slack_gram,
    slack_psd_check,
)

__version__ = "0.1.0"
