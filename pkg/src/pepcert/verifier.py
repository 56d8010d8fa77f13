"""Independent certificate verification by symbolic aggregation.

Quadratic expressions of the interpolation inequalities are expanded over the
basis (h, g_0, ..., g_N) with h = x_0 - x_star, dimension N+2: iterates are
eliminated through x_k = x_0 - alpha * sum_{l<k} g_l, and the reference point
enters only through h (its gradient is zero). An aggregate holds

    value = sum_i fcoef[i] * f_i  +  v^T gram v

where the f-index order is (star, 0, ..., N), v is the basis column, and gram
is stored symmetric (a cross term <u, w> contributes (u w^T + w u^T)/2).

The decisive check: the multiplier matrix built from derived certificate data
must aggregate to exactly the rate expression plus the residual error terms,
coefficient by coefficient, for any admissible (alpha, r) and any d.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .recursion import FullCertificate

__all__ = [
    "STAR",
    "LambdaMatrix",
    "QuadraticAggregate",
    "assemble_lambda",
    "q_form",
    "aggregate",
    "rhs_with_errors",
    "oracle_check",
    "oracle_scale",
    "check_delta_certificate",
    "slack_gram",
    "slack_psd_check",
]

# sentinel index for the minimizer row/column; maps to matrix position 0
STAR = -1


def _position(i: int) -> int:
    return 0 if i == STAR else 1 + i


@dataclass(frozen=True)
class LambdaMatrix:
    """Multiplier matrix, rows/columns indexed (star, 0, ..., N)."""

    N: int
    entries: np.ndarray

    def __post_init__(self):
        if self.entries.shape != (self.N + 2, self.N + 2):
            raise ValueError(
                f"entries must be ({self.N + 2}, {self.N + 2}), got {self.entries.shape}"
            )


@dataclass
class QuadraticAggregate:
    """Linear functional on objective values plus a symmetric bilinear form
    over (h, g_0, ..., g_N)."""

    fcoef: np.ndarray
    gram: np.ndarray

    def __post_init__(self):
        n = self.fcoef.shape[0]
        if self.gram.shape != (n, n):
            raise ValueError("gram shape inconsistent with fcoef")
        asym = np.max(np.abs(self.gram - self.gram.T))
        scale = max(1.0, float(np.max(np.abs(self.gram))))
        if asym > 1e-14 * scale:
            raise ValueError(f"gram asymmetry {asym:.3e} exceeds 1e-14 of scale")
        self.gram = 0.5 * (self.gram + self.gram.T)

    @classmethod
    def zeros(cls, N: int) -> "QuadraticAggregate":
        return cls(np.zeros(N + 2), np.zeros((N + 2, N + 2)))

    def max_abs_diff(self, other: "QuadraticAggregate") -> float:
        return max(
            float(np.max(np.abs(self.fcoef - other.fcoef))),
            float(np.max(np.abs(self.gram - other.gram))),
        )


def assemble_lambda(cert: FullCertificate) -> LambdaMatrix:
    """Multiplier matrix from certificate data.

    Row star carries (0, c_0, ..., c_N); a_i sits one step right of the
    diagonal, b_i one step left; the block entry at (i, j) for j >= i+2 is
    d_i * c_j. Row N and the star column stay zero.
    """
    N = cert.params.N
    lam = np.zeros((N + 2, N + 2))
    lam[0, 1:] = cert.c
    lam[1:N, 1:] = np.triu(np.outer(cert.d, cert.c), k=2)  # keeps j >= i+2 only
    rows = np.arange(N)
    lam[1 + rows, 2 + rows] = cert.a
    rows = np.arange(N - 1)
    lam[2 + rows, 1 + rows] = cert.b
    return LambdaMatrix(N=N, entries=lam)


def _add_interp_pair(fcoef, gram, i: int, j: int, w: float, N: int, alpha: float):
    """Accumulate w * Q_ij, the weighted interpolation inequality between
    points i and j, into (fcoef, gram)."""
    fcoef[_position(i)] += w
    fcoef[_position(j)] -= w
    if j != STAR:
        # -w <g_j, x_i - x_j>; zero when j is star since g_star = 0
        dx = np.zeros(N + 2)
        if i == STAR:
            dx[0] = -1.0
            dx[1 : 1 + j] = alpha
        else:
            lo, hi = (i, j) if i < j else (j, i)
            dx[1 + lo : 1 + hi] = alpha if i < j else -alpha
        pj = _position(j)
        gram[pj, :] -= 0.5 * w * dx
        gram[:, pj] -= 0.5 * w * dx
    # -w/2 ||g_i - g_j||^2 with g_star = 0
    if i == STAR:
        gram[_position(j), _position(j)] -= 0.5 * w
    elif j == STAR:
        gram[_position(i), _position(i)] -= 0.5 * w
    else:
        pi, pj = _position(i), _position(j)
        gram[pi, pi] -= 0.5 * w
        gram[pj, pj] -= 0.5 * w
        gram[pi, pj] += 0.5 * w
        gram[pj, pi] += 0.5 * w


def q_form(i: int, j: int, N: int, alpha: float) -> QuadraticAggregate:
    """Expand one interpolation inequality

        f_i - f_j - <g_j, x_i - x_j> - 1/2 ||g_i - g_j||^2

    over the basis. Indices run over STAR and 0..N, i != j. The expansion
    does not involve r."""
    for idx in (i, j):
        if idx != STAR and not 0 <= idx <= N:
            raise ValueError(f"index {idx} outside {{star, 0..{N}}}")
    if i == j:
        raise ValueError("q_form requires i != j")
    agg = QuadraticAggregate.zeros(N)
    _add_interp_pair(agg.fcoef, agg.gram, i, j, 1.0, N, alpha)
    return QuadraticAggregate(agg.fcoef, agg.gram)


def aggregate(lam: LambdaMatrix, N: int, alpha: float) -> QuadraticAggregate:
    """Sum of lam[i, j] * Q_ij over the nonzero multiplier entries."""
    if lam.N != N:
        raise ValueError(f"lambda is for N={lam.N}, not {N}")
    fcoef = np.zeros(N + 2)
    gram = np.zeros((N + 2, N + 2))
    for p, q in zip(*np.nonzero(lam.entries)):
        i = STAR if p == 0 else int(p) - 1
        j = STAR if q == 0 else int(q) - 1
        _add_interp_pair(fcoef, gram, i, j, float(lam.entries[p, q]), N, alpha)
    return QuadraticAggregate(fcoef, gram)


def rhs_with_errors(cert: FullCertificate) -> QuadraticAggregate:
    """Target expansion: f_star - f_N plus the rate term minus the rank-one
    slack, plus the residual error terms.

    The two squared distances cancel the r ||h||^2 parts, leaving
    <h, sum c_i g_i> - (1/4r) ||sum c_i g_i||^2; the error terms contribute
    eps_i on f_i - f_star for i < N and eps_N / 2 on ||g_0||^2."""
    N, r = cert.params.N, cert.params.r
    eps = cert.eps
    fcoef = np.zeros(N + 2)
    fcoef[0] = 1.0 - float(np.sum(eps[:N]))
    fcoef[1 : 1 + N] = eps[:N]
    fcoef[1 + N] = -1.0
    cg = np.zeros(N + 2)
    cg[1:] = cert.c
    gram = np.zeros((N + 2, N + 2))
    gram[0, :] += 0.5 * cg
    gram[:, 0] += 0.5 * cg
    gram -= np.outer(cg, cg) / (4.0 * r)
    gram[1, 1] += eps[N] / 2.0
    return QuadraticAggregate(fcoef, gram)


def oracle_scale(cert: FullCertificate) -> float:
    """Natural magnitude of the aggregate coefficients: entries grow like
    c_i c_j / (2 r), so deviations are measured against max(1, ||c||^2 / r)."""
    return max(1.0, float(np.dot(cert.c, cert.c) / cert.params.r))


def oracle_check(cert: FullCertificate, tol: float | None = None) -> float:
    """Max coefficient deviation between the aggregated multiplier expansion
    and the target expansion.

    The elimination identity makes this ~0 for every d and every admissible
    (alpha, r), certificate or not; a nonzero value localizes a transcription
    error. With `tol` given, a deviation above it raises ValueError.
    """
    lam = assemble_lambda(cert)
    agg = aggregate(lam, cert.params.N, cert.params.alpha)
    rhs = rhs_with_errors(cert)
    dev = agg.max_abs_diff(rhs)
    if tol is not None and not dev <= tol:
        raise ValueError(f"oracle deviation {dev:.3e} exceeds tolerance {tol:.3e}")
    return dev


def check_delta_certificate(cert: FullCertificate):
    """(is_cert, delta, bound): positivity of (a, b, c, d), total positive
    error delta = sum max(eps_i, 0), and the implied rate bound r + delta/2."""
    delta = float(np.sum(np.maximum(cert.eps, 0.0)))
    return cert.positive, delta, cert.params.r + delta / 2.0


def slack_gram(cert: FullCertificate) -> np.ndarray:
    """Gram matrix of the slack term r ||h - (1/2r) sum c_i g_i||^2, assembled
    term by term from its expansion."""
    N, r = cert.params.N, cert.params.r
    cg = np.zeros(N + 2)
    cg[1:] = cert.c
    eh = np.zeros(N + 2)
    eh[0] = 1.0
    gram = r * np.outer(eh, eh)
    gram -= 0.5 * (np.outer(eh, cg) + np.outer(cg, eh))
    gram += np.outer(cg, cg) / (4.0 * r)
    return gram


def slack_psd_check(cert: FullCertificate, gram: np.ndarray | None = None,
                    tol: float = 1e-12) -> bool:
    """Confirm the slack Gram is the rank-one PSD matrix r v v^T for the
    coefficient vector v of the linear form h - (1/2r) sum c_i g_i.

    A perfect square by construction; the check guards assembly bugs (pass a
    corrupted `gram` to see it fail). Also requires the numerical rank to be
    one: second singular value at most 1e-10 of the first.
    """
    N, r = cert.params.N, cert.params.r
    if gram is None:
        gram = slack_gram(cert)
    v = np.zeros(N + 2)
    v[0] = 1.0
    v[1:] = -cert.c / (2.0 * r)
    rank_one = r * np.outer(v, v)
    scale = max(1.0, float(np.max(np.abs(rank_one))))
    if float(np.max(np.abs(gram - rank_one))) > tol * scale:
        return False
    svals = np.linalg.svd(gram, compute_uv=False)
    return bool(svals[0] > 0.0 and svals[1] <= 1e-10 * svals[0])
