"""Independent verification of a certificate.

Trust nothing about the solver: expand the weighted sum of interpolation
inequalities symbolically over the basis (x0 - xstar, g_0, ..., g_N) and
match it, coefficient by coefficient, against the target rate expression.
The match must hold for ANY d (the residual terms absorb the mismatch), so
this checks every equation of the elimination at once; perturbing any derived
entry breaks it immediately.
"""

import numpy as np

from pepcert import (
    aggregate,
    assemble_lambda,
    check_delta_certificate,
    derive_full,
    gauss_newton,
    oracle_check,
    oracle_scale,
    rhs_with_errors,
    slack_gram,
    solve_rate_params,
)

n = 12
params = solve_rate_params(n)
report = gauss_newton(params, np.full(n - 1, 0.3))
cert = derive_full(params, report.d)

# multiplier matrix: one dense row, two off-diagonals, a rank-one-ish block
lam = assemble_lambda(cert)
print(f"multiplier matrix for N={n}: shape {lam.entries.shape}, "
      f"{np.count_nonzero(lam.entries)} nonzeros, "
      f"min entry {lam.entries[lam.entries > 0].min():.3e}")
print(f"last column sums to {lam.entries[:, -1].sum():.16f} (must be 1)\n")

# the coefficient match, certificate or not
dev = oracle_check(cert)
print(f"aggregation vs target, max coefficient deviation: {dev:.3e}")
print(f"(scaled tolerance would be {1e-10 * oracle_scale(cert):.3e})\n")

arbitrary = derive_full(params, np.full(n - 1, 0.8))
print(f"same match at a non-certificate d: {oracle_check(arbitrary):.3e}")
print("the identity is structural; eps absorbs the failure to certify\n")

# sensitivity: a one-part-in-a-thousand bump is loudly visible
lam.entries[3, 4] += 1e-3
broken = aggregate(lam, n, params.alpha).max_abs_diff(rhs_with_errors(cert))
print(f"after bumping one multiplier entry by 1e-3: deviation {broken:.3e}\n")

# the slack term is a perfect square: rank-one PSD Gram
svals = np.linalg.svd(slack_gram(cert), compute_uv=False)
print(f"slack Gram singular values: {svals[0]:.3e}, {svals[1]:.3e}, ... "
      f"(ratio {svals[1] / svals[0]:.1e})")

# and the bound this certificate proves
is_cert, delta, bound = check_delta_certificate(cert)
print(f"\ndelta-certificate: positive={is_cert}, delta={delta:.2e}")
print(f"implied worst-case bound: r + delta/2 = {bound!r}")
print(f"versus r(N)             : {params.r!r}")
