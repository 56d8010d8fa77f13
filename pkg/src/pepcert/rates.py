"""Stepsize/rate pair balancing the two extremal objectives of constant-stepsize
gradient descent, closed-form worst-case performances, and exact 1-D simulations.

Everything is normalized to smoothness L = 1 and initial distance D = 1. The
stepsize alpha(N) is the unique root >= 1 of

    1 / (2 (2 N alpha + 1)) = (1 - alpha)^(2N) / 2

and r(N) is the common value of the two sides: the worst-case final objective
gap after N steps on the quadratic x^2/2 (right side) and on the matched Huber
objective (left side).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import mpmath as mp
import numpy as np

__all__ = [
    "BALANCE_TOL",
    "RateParams",
    "ObjectiveKind",
    "ObjectiveSpec",
    "SimTrace",
    "solve_rate_params",
    "solve_rate_params_mp",
    "quadratic_rate",
    "huber_rate",
    "simulate",
    "lower_bound_envelope",
]

# absolute defect allowed in the defining balance equation for stored params
BALANCE_TOL = 1e-14


def quadratic_rate(N, alpha):
    """Final objective gap of N gradient steps on x^2/2 from x0 = 1:
    (1 - alpha)^(2N) / 2.

    Works on floats, numpy arrays, and mpmath scalars alike.
    """
    return (1.0 - alpha) ** (2 * N) / 2.0


def huber_rate(N, alpha):
    """Final objective gap on the Huber objective with breakpoint
    1/(2 N alpha + 1) from x0 = 1: 1 / (2 (2 N alpha + 1)).

    Requires alpha >= 0 (the trajectory stays in the linear region).
    """
    return 1.0 / (2.0 * (2 * N * alpha + 1.0))


def _log_balance(N: int, alpha: float) -> float:
    # log of (alpha-1)^(2N) (2N alpha + 1); root of this = root of the balance
    # defect. Log domain keeps (alpha-1)^(2N) from underflowing at large N.
    if alpha <= 1.0:
        return -math.inf
    return 2 * N * math.log(alpha - 1.0) + math.log(2 * N * alpha + 1.0)


def _log_balance_slope(N: int, alpha: float) -> float:
    return 2 * N / (alpha - 1.0) + 2 * N / (2 * N * alpha + 1.0)


@dataclass(frozen=True)
class RateParams:
    """Problem size N with the balancing stepsize alpha and rate r.

    Validated on construction: alpha in (1, 2), r in (0, 1/2), and the two
    closed-form performances at alpha agree with each other and with r to
    BALANCE_TOL (absolute).
    """

    N: int
    alpha: float
    r: float

    def __post_init__(self):
        if self.N < 1:
            raise ValueError(f"N must be >= 1, got {self.N}")
        if not 1.0 < self.alpha < 2.0:
            raise ValueError(f"alpha must lie in (1, 2), got {self.alpha}")
        if not 0.0 < self.r < 0.5:
            raise ValueError(f"r must lie in (0, 1/2), got {self.r}")
        q = quadratic_rate(self.N, self.alpha)
        h = huber_rate(self.N, self.alpha)
        if abs(q - h) > BALANCE_TOL:
            raise ValueError(
                f"balance equation violated at N={self.N}: "
                f"quadratic {q!r} vs huber {h!r}"
            )
        if abs(self.r - h) > BALANCE_TOL:
            raise ValueError(f"r={self.r!r} is not the common value {h!r}")


def solve_rate_params(N: int) -> RateParams:
    """Solve the balance equation for the stepsize alpha(N) >= 1 and rate r(N).

    Bisection brackets the sign change of the log-domain balance defect on
    [1, 2), then safeguarded Newton polishes the root. The defect is strictly
    increasing on (1, 2) (its slope is positive), so the root is unique; the
    bracket signs are asserted.

    Returns float64 parameters: alpha within ~1 ulp of the true root, r the
    common value from the well-conditioned Huber side.
    """
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    lo, hi = 1.0, 2.0
    fhi = _log_balance(N, hi)  # log((2N*2+1)) > 0 always
    if not fhi > 0.0:
        raise ArithmeticError(f"no sign change on [1, 2) for N={N}")
    # bisect to a short bracket, then Newton confined to it
    for _ in range(20):
        mid = 0.5 * (lo + hi)
        if _log_balance(N, mid) < 0.0:
            lo = mid
        else:
            hi = mid
    alpha = 0.5 * (lo + hi)
    for _ in range(60):
        f = _log_balance(N, alpha)
        if f < 0.0:
            lo = alpha
        else:
            hi = alpha
        step = f / _log_balance_slope(N, alpha)
        nxt = alpha - step
        if not lo < nxt < hi:
            nxt = 0.5 * (lo + hi)
        if nxt == alpha:
            break
        alpha = nxt
    return RateParams(N=N, alpha=alpha, r=huber_rate(N, alpha))


def solve_rate_params_mp(N: int, dps: int = 50):
    """High-precision (alpha, r) as a pair of mpmath scalars.

    Newton on the log-domain balance defect, seeded by the float64 root; the
    residual lands near 10**(5 - dps). Use for tolerance studies where float64
    quantization of alpha (relative defect ~ 2 N eps) is too coarse.
    """
    seed = solve_rate_params(N).alpha
    with mp.workdps(dps):
        a = mp.mpf(seed)
        for _ in range(6):
            f = 2 * N * mp.log(a - 1) + mp.log(2 * N * a + 1)
            step = f / (2 * N / (a - 1) + 2 * N / (2 * N * a + 1))
            a -= step
            if abs(step) < mp.mpf(10) ** (2 - dps):
                break
        r = 1 / (2 * (2 * N * a + 1))
        return +a, +r


class ObjectiveKind(Enum):
    QUADRATIC = "quadratic"
    HUBER = "huber"


@dataclass(frozen=True)
class ObjectiveSpec:
    """One of the two extremal 1-D objectives (minimizer at 0, value 0 there).

    For HUBER, delta is the breakpoint: quadratic inside [-delta, delta],
    linear with slope delta outside. Must lie in (0, 1] under the D = 1
    normalization. Ignored for QUADRATIC.
    """

    kind: ObjectiveKind
    delta: float | None = None

    def __post_init__(self):
        if self.kind is ObjectiveKind.HUBER:
            if self.delta is None or not 0.0 < self.delta <= 1.0:
                raise ValueError(f"Huber breakpoint must lie in (0, 1], got {self.delta}")

    @classmethod
    def quadratic(cls) -> "ObjectiveSpec":
        return cls(ObjectiveKind.QUADRATIC)

    @classmethod
    def huber(cls, delta: float) -> "ObjectiveSpec":
        return cls(ObjectiveKind.HUBER, delta)

    def value(self, x: float) -> float:
        if self.kind is ObjectiveKind.QUADRATIC:
            return 0.5 * x * x
        if abs(x) <= self.delta:
            return 0.5 * x * x
        return self.delta * abs(x) - 0.5 * self.delta**2

    def grad(self, x: float) -> float:
        if self.kind is ObjectiveKind.QUADRATIC:
            return x
        if abs(x) <= self.delta:
            return x
        return self.delta if x > 0 else -self.delta


@dataclass(frozen=True)
class SimTrace:
    """Gradient-descent trajectory: iterates, objective values, gradients."""

    xs: np.ndarray
    fvals: np.ndarray
    gvals: np.ndarray


def simulate(obj: ObjectiveSpec, x0: float, alpha: float, N: int) -> SimTrace:
    """Run N exact gradient descent steps x_{k+1} = x_k - alpha * f'(x_k).

    The piecewise Huber gradient is evaluated exactly (no smoothing) so the
    trace reproduces the closed-form performances to rounding.
    """
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    alpha = float(alpha)
    xs = np.empty(N + 1)
    fvals = np.empty(N + 1)
    gvals = np.empty(N + 1)
    x = float(x0)
    for k in range(N + 1):
        xs[k] = x
        fvals[k] = obj.value(x)
        gvals[k] = obj.grad(x)
        if k < N:
            x = x - alpha * gvals[k]
    return SimTrace(xs=xs, fvals=fvals, gvals=gvals)


def lower_bound_envelope(N: int, alphas) -> np.ndarray:
    """Pointwise max of the two closed-form performances over a stepsize grid.

    Every gradient method with constant stepsize alpha' performs at least this
    badly on one of the two objectives, so the grid minimum lower-bounds the
    best achievable worst case; the minimum over a grid containing alpha(N)
    equals r(N).
    """
    alphas = np.asarray(alphas, dtype=float)
    with np.errstate(under="ignore"):
        q = quadratic_rate(N, alphas)
    return np.maximum(q, huber_rate(N, alphas))
