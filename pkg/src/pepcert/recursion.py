"""Certificate elimination: derive (a, b, c) and the residual errors eps from a
candidate vector d.

Index conventions (0-based, matching the multiplier-matrix subscripts):

    d    length N-1, indices 0..N-2   the free certificate vector
    c    length N+1, indices 0..N     affine in d
    a    length N,   indices 0..N-1   quadratic in d, backward recursion
    b    length N-1, indices 0..N-2   quadratic in d, backward recursion
    eps  length N+1, indices 0..N     the residual system; a certificate is a
                                      d with eps identically zero and all of
                                      a, b, c, d positive

All derivation functions accept leading batch dimensions on their array
arguments (shape (..., k)); the recursion runs vectorized across the batch.
Requires N >= 3.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .rates import RateParams

__all__ = [
    "CertParams",
    "FullCertificate",
    "c_from_d",
    "ab_from_cd",
    "eps_from",
    "residual",
    "derive_full",
]


@dataclass(frozen=True)
class CertParams:
    """Unvalidated (N, alpha, r) carrier for the recursion.

    The elimination identity holds for any stepsize/rate pair, not only the
    balancing one, so derivations accept this alongside RateParams (which
    enforces the balance equation). Useful for oracle trials at arbitrary
    admissible values.
    """

    N: int
    alpha: float
    r: float

    def __post_init__(self):
        if self.N < 3:
            raise ValueError(f"N must be >= 3, got {self.N}")
        if not self.alpha > 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if not self.r > 0:
            raise ValueError(f"r must be positive, got {self.r}")


Params = RateParams | CertParams


def _check_n(N: int):
    if N < 3:
        raise ValueError(f"certificate recursion requires N >= 3, got N={N}")


def _check_len(name: str, arr: np.ndarray, expect: int):
    if arr.shape[-1] != expect:
        raise ValueError(
            f"{name} must have length {expect} along the last axis, "
            f"got {arr.shape[-1]}"
        )


def _cumsum(x: np.ndarray, compensated: bool) -> np.ndarray:
    if not compensated:
        return np.cumsum(x, axis=-1)
    # Kahan running sum along the last axis
    out = np.empty_like(x)
    s = np.zeros(x.shape[:-1])
    carry = np.zeros(x.shape[:-1])
    for i in range(x.shape[-1]):
        y = x[..., i] - carry
        t = s + y
        carry = (t - s) - y
        s = t
        out[..., i] = s
    return out


def _suffix_sums(c: np.ndarray, compensated: bool) -> np.ndarray:
    # suff[..., k] = sum_{j >= k} c_j, with one extra trailing zero so that
    # empty suffixes index cleanly
    suff = np.zeros(c.shape[:-1] + (c.shape[-1] + 1,))
    suff[..., :-1] = _cumsum(c[..., ::-1], compensated)[..., ::-1]
    return suff


def c_from_d(params: Params, d, kahan: bool = False) -> np.ndarray:
    """The vector c (length N+1), affine in d.

    c_i = 2r (alpha * sum_{l<=i} d_l - d_i + alpha) for i <= N-2,
    c_{N-1} = 2r (1 + sum d + (alpha-1)/sqrt(2r)), c_N = sqrt(2r).
    """
    N, alpha, r = params.N, params.alpha, params.r
    _check_n(N)
    d = np.asarray(d, dtype=float)
    _check_len("d", d, N - 1)
    two_r = 2.0 * r
    sd = _cumsum(d, kahan)
    c = np.empty(d.shape[:-1] + (N + 1,))
    c[..., : N - 1] = two_r * (alpha * sd - d + alpha)
    c[..., N - 1] = two_r * (1.0 + sd[..., -1] + (alpha - 1.0) / math.sqrt(two_r))
    c[..., N] = math.sqrt(two_r)
    return c


def ab_from_cd(params: Params, c, d, kahan: bool = False):
    """The vectors a (length N) and b (length N-1) by backward recursion.

    a_{N-1} comes from the unit-sum condition on the last multiplier column;
    (a_{N-2}, b_{N-2}) from the closing pair of equations; then each (a_i, b_i)
    for i = N-3 down to 0 from the running pair, using prefix sums of d and
    suffix sums of c (one pass each, so the whole derivation is O(N)).
    """
    N, alpha, r = params.N, params.alpha, params.r
    _check_n(N)
    c = np.asarray(c, dtype=float)
    d = np.asarray(d, dtype=float)
    _check_len("c", c, N + 1)
    _check_len("d", d, N - 1)
    two_r = 2.0 * r
    sd = _cumsum(d, kahan)
    suffc = _suffix_sums(c, kahan)
    # od[..., k] = 1 + sum_{j <= k-1} d_j for k = 0..N-1
    od = np.empty(d.shape[:-1] + (N,))
    od[..., 0] = 1.0
    od[..., 1:] = 1.0 + sd

    shape = d.shape[:-1]
    a = np.empty(shape + (N,))
    b = np.empty(shape + (N - 1,))
    a[..., N - 1] = 1.0 - c[..., N] * od[..., N - 1]
    a[..., N - 2] = (
        c[..., N - 1] ** 2 / two_r
        + c[..., N - 2] * c[..., N - 1] / two_r
        - a[..., N - 1]
        - (1.0 + alpha) * c[..., N - 1] * od[..., N - 2]
    ) / alpha
    b[..., N - 2] = (
        (alpha - 1.0) * c[..., N - 1] ** 2 / two_r
        - c[..., N - 2] * c[..., N - 1] / two_r
        - (alpha - 1.0) * a[..., N - 1]
        + c[..., N - 1] * od[..., N - 2]
    ) / alpha
    for i in range(N - 3, -1, -1):
        tail = d[..., i + 1] * suffc[..., i + 3]
        cross = c[..., i] * c[..., i + 1] / two_r
        csq = c[..., i + 1] ** 2 / two_r
        lin = c[..., i + 1] * od[..., i]
        a[..., i] = (
            csq + cross - a[..., i + 1] - (1.0 + alpha) * lin - tail
            + (2.0 * alpha - 1.0) * b[..., i + 1]
        ) / alpha
        b[..., i] = (
            (alpha - 1.0) * (csq - a[..., i + 1] - tail + (2.0 * alpha - 1.0) * b[..., i + 1])
            - cross + lin
        ) / alpha
    return a, b


def eps_from(params: Params, a, b, c, d, kahan: bool = False) -> np.ndarray:
    """The residual vector eps (length N+1) from derived (a, b, c) and d."""
    N, alpha, r = params.N, params.alpha, params.r
    _check_n(N)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    c = np.asarray(c, dtype=float)
    d = np.asarray(d, dtype=float)
    _check_len("a", a, N)
    _check_len("b", b, N - 1)
    _check_len("c", c, N + 1)
    _check_len("d", d, N - 1)
    sd = _cumsum(d, kahan)
    suffc = _suffix_sums(c, kahan)
    od = np.empty(d.shape[:-1] + (N,))
    od[..., 0] = 1.0
    od[..., 1:] = 1.0 + sd

    eps = np.empty(np.broadcast_shapes(a.shape[:-1], d.shape[:-1]) + (N + 1,))
    eps[..., 0] = a[..., 0] + d[..., 0] * suffc[..., 2] - b[..., 0] - c[..., 0]
    eps[..., 1 : N - 1] = (
        b[..., 0 : N - 2]
        + a[..., 1 : N - 1]
        + d[..., 1 : N - 1] * suffc[..., 3 : N + 1]
        - a[..., 0 : N - 2]
        - b[..., 1 : N - 1]
        - c[..., 1 : N - 1] * od[..., 0 : N - 2]
    )
    eps[..., N - 1] = (
        b[..., N - 2] + a[..., N - 1] - a[..., N - 2]
        - c[..., N - 1] * od[..., N - 2]
    )
    eps[..., N] = (
        -c[..., 0] - a[..., 0] - d[..., 0] * suffc[..., 2]
        + (2.0 * alpha - 1.0) * b[..., 0]
        + c[..., 0] ** 2 / (2.0 * r)
    )
    return eps


def residual(params: Params, d, kahan: bool = False) -> np.ndarray:
    """Residuals eps(d): the composition of the three derivations.

    Each component is an exactly quadratic polynomial in d; a zero of the map
    with positive derived data is a certificate.
    """
    c = c_from_d(params, d, kahan)
    a, b = ab_from_cd(params, c, d, kahan)
    return eps_from(params, a, b, c, d, kahan)


@dataclass(frozen=True)
class FullCertificate:
    """Complete certificate data (a, b, c, d, eps) for one problem size.

    Lengths are enforced on construction; c[N] and a[N-1] are pinned to their
    defining expressions bit-for-bit (same accumulation order as the
    derivation), which makes file round-trips safely re-checkable.
    """

    params: Params
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    d: np.ndarray
    eps: np.ndarray

    def __post_init__(self):
        N = self.params.N
        _check_n(N)
        for name, arr, expect in (
            ("a", self.a, N),
            ("b", self.b, N - 1),
            ("c", self.c, N + 1),
            ("d", self.d, N - 1),
            ("eps", self.eps, N + 1),
        ):
            if arr.ndim != 1:
                raise ValueError(f"{name} must be one-dimensional")
            _check_len(name, arr, expect)
        if self.c[N] != math.sqrt(2.0 * self.params.r):
            raise ValueError("c[N] != sqrt(2 r)")
        tail = 1.0 - self.c[N] * (1.0 + np.cumsum(self.d)[-1])
        if abs(self.a[N - 1] - tail) > 1e-12 * max(1.0, abs(tail)):
            raise ValueError("a[N-1] violates the unit-column condition")

    @property
    def positive(self) -> bool:
        """True when all of a, b, c, d are strictly positive."""
        return bool(
            (self.a > 0).all() and (self.b > 0).all()
            and (self.c > 0).all() and (self.d > 0).all()
        )


def derive_full(params: Params, d, kahan: bool = False) -> FullCertificate:
    """Bundle the whole derivation for a single d into a FullCertificate."""
    d = np.asarray(d, dtype=float)
    if d.ndim != 1:
        raise ValueError("derive_full expects a single 1-D vector d")
    c = c_from_d(params, d, kahan)
    a, b = ab_from_cd(params, c, d, kahan)
    eps = eps_from(params, a, b, c, d, kahan)
    return FullCertificate(params=params, a=a, b=b, c=c, d=d.copy(), eps=eps)
