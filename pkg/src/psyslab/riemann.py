"""Hyperbolic-region change of variables and Riccati machinery.

For u < 0 the system has eigenvalues lambda_{1,2} = +-sqrt(-p'(u))
(family ``first`` takes the upper sign) and Riemann invariants

    r_1 = v - q(u),   r_2 = v + q(u),
    q(u) = integral_u^0 sqrt(-p'(s)) ds,

where q is positive and strictly decreasing for u < 0 with q(0) = 0 and
q'(u) = -sqrt(-p'(u)).  The state is recovered by

    v = (r_1 + r_2) / 2,   u = q^{-1}((r_2 - r_1) / 2).

Both eigenvalues are genuinely nonlinear: d(lambda_i)/d(r_i) =
p''(u) / (4 p'(u)), which diverges as u -> 0-.  Along a characteristic
of its own family the scaled gradient

    beta = r_x * (-p'(u))**(1/4)

obeys the Riccati equation beta' = -k beta^2 with

    k(u) = -p''(u) / (4 (-p'(u))**(5/4)) < 0,

whose exact solution is beta(t) = beta0 / (1 + beta0 * K(t)) with
K(t) = integral of k along the curve.  A vanishing denominator is the
gradient catastrophe.
"""

from __future__ import annotations

import enum
from typing import NamedTuple

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from .errors import BlowUpError, DomainError

#: absolute tolerance of the quadrature used for q on non-quadratic laws
Q_QUAD_TOL = 1e-12


class Family(enum.Enum):
    """Characteristic family; ``first`` is the + sqrt(-p') branch."""

    first = 1
    second = 2

    @property
    def sign(self) -> float:
        return 1.0 if self is Family.first else -1.0


class RiemannPair(NamedTuple):
    r1: float
    r2: float


def _require_nonpositive(u, what="u"):
    if np.any(np.asarray(u) > 0.0):
        raise DomainError(f"{what} must be <= 0 (hyperbolic closure)")


def _require_negative(u, what="u"):
    if np.any(np.asarray(u) >= 0.0):
        raise DomainError(f"{what} must be < 0 (strict hyperbolic interior)")


def q_of_u(law, u):
    """q(u) = integral_u^0 sqrt(-p'(s)) ds for u <= 0.

    Quadratic laws use the closed form (2/3)(-u)^(3/2).  Other laws use
    adaptive quadrature after the substitution s = -w^2, which removes
    the square-root endpoint singularity of the integrand at s = 0:

        q(u) = integral_0^sqrt(-u) 2 w sqrt(-p'(-w^2)) dw,

    whose integrand behaves like 2 w^2 sqrt(p''(0)) near w = 0.
    Accepts scalars or arrays.
    """
    _require_nonpositive(u)
    if getattr(law, "kind", None) == "quadratic":
        return (2.0 / 3.0) * np.abs(u) ** 1.5 if isinstance(u, np.ndarray) \
            else (2.0 / 3.0) * (-float(u)) ** 1.5

    def integrand(w):
        return 2.0 * w * np.sqrt(-law.dp(-w * w))

    def one(uu):
        if uu == 0.0:
            return 0.0
        val, _ = quad(integrand, 0.0, np.sqrt(-uu),
                      epsabs=Q_QUAD_TOL, epsrel=1e-12, limit=200)
        return val

    if isinstance(u, np.ndarray):
        return np.array([one(float(x)) for x in u])
    return one(float(u))


def u_of_q(law, y: float) -> float:
    """Inverse of q: the unique u <= 0 with q(u) = y, for y >= 0.

    q is strictly decreasing in u, so a bracketing root search is
    unconditionally safe.  The initial bracket exploits the
    quadratic-like growth of q and is widened geometrically if needed.
    """
    y = float(y)
    if y < 0.0:
        raise DomainError("y must be >= 0")
    if y == 0.0:
        return 0.0
    left = -max(1.0, 2.0 * (1.5 * y) ** (2.0 / 3.0))
    for _ in range(200):
        if q_of_u(law, left) >= y:
            break
        left *= 2.0
    else:
        raise DomainError(f"could not bracket q(u) = {y}")
    root = brentq(lambda uu: q_of_u(law, uu) - y, left, 0.0,
                  xtol=1e-14, rtol=8.9e-16)
    return min(float(root), 0.0)


def riemann_from_state(law, u: float, v: float) -> RiemannPair:
    """(r1, r2) = (v - q(u), v + q(u)) for a hyperbolic state u <= 0."""
    _require_nonpositive(u)
    qv = q_of_u(law, u)
    return RiemannPair(v - qv, v + qv)


def state_from_riemann(law, pair: RiemannPair):
    """Recover (u, v) from the invariants: v = (r1+r2)/2, u = q^{-1}((r2-r1)/2)."""
    r1, r2 = pair
    if r2 < r1:
        raise DomainError("requires r2 >= r1 (r2 - r1 = 2 q(u) >= 0)")
    v = 0.5 * (r1 + r2)
    u = u_of_q(law, 0.5 * (r2 - r1))
    return u, v


def eigenvalue(law, u, fam: Family):
    """Characteristic speed: +sqrt(-p'(u)) for first, -sqrt for second."""
    _require_nonpositive(u)
    return fam.sign * np.sqrt(-law.dp(u))


def genuine_nonlinearity(law, u):
    """d(lambda_1)/d(r_1) = d(lambda_2)/d(r_2) = p''(u) / (4 p'(u)).

    Negative for u < 0; its magnitude diverges as u -> 0-.
    """
    _require_negative(u)
    return law.ddp(u) / (4.0 * law.dp(u))


def riccati_k(law, u):
    """Riccati coefficient k(u) = -p''(u) / (4 (-p'(u))^(5/4)) < 0."""
    _require_negative(u)
    return -law.ddp(u) / (4.0 * (-law.dp(u)) ** 1.25)


def beta_from_gradient(law, u, r_x):
    """Scaled invariant gradient beta = r_x * (-p'(u))^(1/4)."""
    _require_negative(u)
    return r_x * (-law.dp(u)) ** 0.25


def riccati_evolve(beta0: float, K: float) -> float:
    """Closed-form Riccati solution beta0 / (1 + beta0 * K).

    K is the accumulated integral of k along the characteristic (<= 0
    going forward, since k < 0).  Raises BlowUpError when the
    denominator is <= 0: the gradient diverged at or before K.
    """
    den = 1.0 + beta0 * K
    if den <= 0.0:
        raise BlowUpError(
            f"1 + beta0*K = {den:g} <= 0: gradient catastrophe reached")
    return beta0 / den
