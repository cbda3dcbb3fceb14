"""Chebyshev polynomials of both kinds on the whole real line.

Everything here is evaluated through the trigonometric/hyperbolic closed
forms rather than the three-term recurrence, so values and ratios stay
well-conditioned for arguments far outside [-1, 1].  Downstream code never
needs a raw polynomial value at a huge argument: it consumes the bounded
ratio ``q = U_{N-1}(x)/T_N(x)`` (and its derivative), which this module keeps
finite for |x| up to ~1e300 and N up to 1e6.

Index conventions: ``U_{-1} = 0`` and ``U_{-2} = -1`` (the standard backward
extension of the recurrence), so that N = 0 and N = 1 lattice formulas reduce
without special cases.
"""

from __future__ import annotations

import math

from .errors import ZeroOfTError

__all__ = [
    "cheb_T",
    "cheb_U",
    "cheb_ratio_q",
    "cheb_q_derivative",
    "cheb_T_sign",
]

# |T_N| below this (trig regime) counts as a root of T_N.
ZERO_OF_T_TOL = 1e-12
# |x^2 - 1| below this switches q' to the exact endpoint derivative.
BAND_EDGE_TOL = 1e-10


def _require_finite(x: float) -> float:
    if not math.isfinite(x):
        raise ValueError(f"argument must be finite, got {x!r}")
    return float(x)


def _sqrt_x2_minus_1(x: float) -> float:
    # sqrt(x^2 - 1) for x > 1 without forming x^2 (which overflows past 1e154).
    return math.sqrt(x - 1.0) * math.sqrt(x + 1.0)


def cheb_T(n: int, x: float) -> float:
    """First-kind polynomial T_n(x), stable on the whole real line."""
    if n < 0:
        raise ValueError("cheb_T requires n >= 0")
    x = _require_finite(x)
    if x >= 1.0:
        if x == 1.0:
            return 1.0
        return math.cosh(n * math.acosh(x))
    if x <= -1.0:
        if x == -1.0:
            return -1.0 if n % 2 else 1.0
        value = math.cosh(n * math.acosh(-x))
        return -value if n % 2 else value
    return math.cos(n * math.acos(x))


def cheb_U(n: int, x: float) -> float:
    """Second-kind polynomial U_n(x) with U_{-1} = 0 and U_{-2} = -1."""
    if n < -2:
        raise ValueError("cheb_U requires n >= -2")
    x = _require_finite(x)
    if n == -1:
        return 0.0
    if n == -2:
        return -1.0
    m = n + 1
    if x >= 1.0:
        if x == 1.0:
            return float(m)
        return math.sinh(m * math.acosh(x)) / _sqrt_x2_minus_1(x)
    if x <= -1.0:
        if x == -1.0:
            return float(-m if n % 2 else m)
        value = math.sinh(m * math.acosh(-x)) / _sqrt_x2_minus_1(-x)
        return -value if n % 2 else value
    psi = math.acos(x)
    return math.sin(m * psi) / math.sin(psi)


def cheb_ratio_q(n_cells: int, x: float) -> float:
    """Bounded ratio U_{N-1}(x)/T_N(x).

    Outside the band (|x| > 1) this is tanh(N*arccosh|x|)/sqrt(x^2-1) up to
    parity, which never overflows; inside the band it is tan(N*psi)/sin(psi)
    with psi = arccos(x).

    Raises
    ------
    ZeroOfTError
        If x sits on a root of T_N (only possible for |x| < 1).
    """
    if n_cells < 1:
        raise ValueError("cheb_ratio_q requires n_cells >= 1")
    x = _require_finite(x)
    n = n_cells
    if x >= 1.0:
        if x == 1.0:
            return float(n)
        return math.tanh(n * math.acosh(x)) / _sqrt_x2_minus_1(x)
    if x <= -1.0:
        if x == -1.0:
            return float(-n)
        return -math.tanh(n * math.acosh(-x)) / _sqrt_x2_minus_1(-x)
    psi = math.acos(x)
    t_val = math.cos(n * psi)
    if abs(t_val) < ZERO_OF_T_TOL:
        raise ZeroOfTError(n, x)
    return math.sin(n * psi) / (math.sin(psi) * t_val)


def cheb_q_derivative(n_cells: int, x: float) -> float:
    """d/dx of cheb_ratio_q.

    Uses the closed form N/(x^2-1) - q*x/(x^2-1) - N*q^2; the removable 0/0
    at x = +-1 is replaced by the exact endpoint value -N(2N^2+1)/3 (obtained
    from T_N'(+-1) = (+-1)^(N+1) ... via U_n'(+-1) = (+-1)^(n+1) n(n+1)(n+2)/3).
    """
    if n_cells < 1:
        raise ValueError("cheb_q_derivative requires n_cells >= 1")
    x = _require_finite(x)
    n = n_cells
    quad = (x - 1.0) * (x + 1.0)
    if abs(quad) < BAND_EDGE_TOL:
        return -n * (2.0 * n * n + 1.0) / 3.0
    q = cheb_ratio_q(n, x)
    return (n - q * x) / quad - n * q * q


def cheb_T_sign(n: int, x: float) -> float:
    """Sign of T_n(x) as +-1.0, computed without forming T_n itself."""
    if n < 0:
        raise ValueError("cheb_T_sign requires n >= 0")
    x = _require_finite(x)
    if x >= 1.0:
        return 1.0
    if x <= -1.0:
        return -1.0 if n % 2 else 1.0
    t_val = math.cos(n * math.acos(x))
    if abs(t_val) < ZERO_OF_T_TOL:
        raise ZeroOfTError(n, x)
    return math.copysign(1.0, t_val)
