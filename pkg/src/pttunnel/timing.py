"""Closed-form transmission, transmission phase, and stationary-phase times.

The N-cell transmission is t = exp(-i*k*L)/G with

    G = (xi - i*chi) U_{N-1}(xi) - U_{N-2}(xi) = T_N(xi) - i*chi*U_{N-1}(xi),

where xi and chi are real functions of (E, V, b) built from the cell
geometry.  The stationary-phase time is the k-derivative of the transmission
phase plus the free-passage term; in natural units

    tau = (1/2k) * d(arctan(q*chi))/dk,   q = U_{N-1}(xi)/T_N(xi),

which this module evaluates analytically.  For thick cells xi grows like
exp(2*beta), so every (xi^2 - 1) denominator is assembled from bounded
ratios (chi/s, xi'/s, ... with s = sqrt(xi^2 - 1)) instead of raw polynomial
values; the exact path refuses beta > BETA_MAX, beyond which the
thick-barrier limit is the only honest answer.

An independent finite-difference time (:func:`tunneling_time_fd`) serves as
the oracle for the analytic expression throughout the tests.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .chebyshev import (
    BAND_EDGE_TOL,
    ZERO_OF_T_TOL,
    cheb_ratio_q,
    cheb_T,
    cheb_T_sign,
    cheb_U,
)
from .errors import (
    DegeneratePotentialError,
    OverflowGuardError,
    SpectralSingularityError,
    ZeroOfTError,
)
from .model import CellSpec, Derived, Particle, derived_quantities

__all__ = [
    "BETA_MAX",
    "ClosedForm",
    "HartmanCoeffs",
    "TunnelingTimeResult",
    "xi_chi",
    "xi_chi_prime",
    "closed_form",
    "transmission_closed",
    "phase_theta",
    "tunneling_time",
    "tunneling_time_result",
    "tunneling_time_fd",
    "hartman_coeffs",
    "hartman_limit_time",
    "free_propagation_time",
    "n_infinity_bracket",
    "square_barrier_time",
]

# Largest growth exponent the exact path accepts: exp(2*beta) must stay well
# inside double range together with its O(1..b) prefactors.
BETA_MAX = 350.0

# |G| below this is treated as a spectral singularity of the lattice.
SINGULARITY_TOL = 1e-12

# ln of the largest representable double, slightly rounded down.
_LN_MAX = 709.0
# Above this ln|G| the components T_N and chi*U_{N-1} may individually
# overflow even though |G| itself is representable; switch to log-domain.
_LN_DIRECT = 690.0


def _span(cell: CellSpec, n_cells: int) -> float:
    return 2.0 * n_cells * cell.width


def _check_beta(d: Derived) -> None:
    if d.beta > BETA_MAX:
        raise OverflowGuardError(
            f"growth exponent beta = {d.beta:.3f} exceeds {BETA_MAX:.0f}; "
            "exp(2*beta) leaves double range -- use the thick-barrier limit"
        )


@dataclass(frozen=True)
class _CellScalars:
    """xi, chi plus the offsets xi -+ 1 in cancellation-free form.

    The time expression divides by xi^2 - 1, and for thin cells xi sits
    within O(b^2) of 1, where forming xi - 1 from the rounded xi would lose
    all leading digits.  Regrouping with cos(2a) = 1 - 2 sin^2(a) and
    cosh(2b) = 1 + 2 sinh^2(b) gives the offsets directly:

        xi - 1 = sinh^2(beta) (1 - cos 2phi cos^2 alpha)
                 - sin^2(alpha) (1 + cos 2phi cosh^2 beta)
        xi + 1 = cos^2(alpha) (1 - cos 2phi sinh^2 beta)
                 + cosh^2(beta) (1 - cos 2phi sin^2 alpha)

    and every downstream (xi^2 - 1) factor is built from these, which keeps
    the free-space (V = 0) reduction of the time exact to rounding at any N.
    """

    xi: float
    xi_minus_1: float
    xi_plus_1: float
    chi: float


def _cell_scalars(d: Derived) -> _CellScalars:
    _check_beta(d)
    sin_a = math.sin(d.alpha)
    cos_a = math.cos(d.alpha)
    sinh_b = math.sinh(d.beta)
    cosh_b = math.cosh(d.beta)
    cos_2phi = math.cos(2.0 * d.phi)
    sin_a2 = sin_a * sin_a
    cos_a2 = cos_a * cos_a
    sinh_b2 = sinh_b * sinh_b
    cosh_b2 = cosh_b * cosh_b
    xi_minus_1 = sinh_b2 * (1.0 - cos_2phi * cos_a2) - sin_a2 * (
        1.0 + cos_2phi * cosh_b2
    )
    xi_plus_1 = cos_a2 * (1.0 - cos_2phi * sinh_b2) + cosh_b2 * (
        1.0 - cos_2phi * sin_a2
    )
    chi = 0.5 * (
        d.u_plus * math.cos(d.phi) * math.sin(2.0 * d.alpha)
        + d.u_minus * math.sin(d.phi) * math.sinh(2.0 * d.beta)
    )
    return _CellScalars(
        xi=0.5 * (xi_minus_1 + xi_plus_1),
        xi_minus_1=xi_minus_1,
        xi_plus_1=xi_plus_1,
        chi=chi,
    )


def _xi_chi(d: Derived) -> tuple[float, float]:
    scalars = _cell_scalars(d)
    return scalars.xi, scalars.chi


def _band_sine_angle(scalars: _CellScalars) -> tuple[float, float]:
    """(sin psi, psi) for |xi| <= 1, with psi = arccos(xi) rebuilt from the
    cancellation-free offsets so that sin psi stays consistent with chi."""
    quad = scalars.xi_minus_1 * scalars.xi_plus_1
    sine = math.sqrt(max(-quad, 0.0))
    return sine, math.atan2(sine, scalars.xi)


def _growth_scale(scalars: _CellScalars) -> float:
    """sqrt(xi^2 - 1) for |xi| > 1 without forming xi^2."""
    return math.sqrt(abs(scalars.xi_minus_1)) * math.sqrt(abs(scalars.xi_plus_1))


def _xi_chi_prime(d: Derived) -> tuple[float, float]:
    _check_beta(d)
    sin_phi = math.sin(d.phi)
    cos_phi = math.cos(d.phi)
    sin_2a = math.sin(2.0 * d.alpha)
    cos_2a = math.cos(2.0 * d.alpha)
    sinh_2b = math.sinh(2.0 * d.beta)
    cosh_2b = math.cosh(2.0 * d.beta)
    xi_p = (
        2.0 * d.beta_prime * sin_phi * sin_phi * sinh_2b
        - 2.0 * d.alpha_prime * cos_phi * cos_phi * sin_2a
        + d.phi_prime * math.sin(2.0 * d.phi) * (cosh_2b - cos_2a)
    )
    chi_p = (
        d.u_plus
        * (d.alpha_prime * cos_2a * cos_phi - 0.5 * d.phi_prime * sin_phi * sin_2a)
        + d.u_minus
        * (d.beta_prime * cosh_2b * sin_phi + 0.5 * d.phi_prime * cos_phi * sinh_2b)
        + 0.5 * d.u_plus_prime * cos_phi * sin_2a
        + 0.5 * d.u_minus_prime * sin_phi * sinh_2b
    )
    return xi_p, chi_p


def xi_chi(particle: Particle, cell: CellSpec) -> tuple[float, float]:
    """Real pair (xi, chi) of the unit cell.

    xi is half the (phase-adjusted) trace of the cell matrix and drives the
    N-cell Chebyshev composition; chi is the matching imaginary part, so that
    the single-cell transmission is exp(-2i*k*b)/(xi - i*chi).

    Raises OverflowGuardError for beta > BETA_MAX.
    """
    return _xi_chi(derived_quantities(particle, cell))


def xi_chi_prime(particle: Particle, cell: CellSpec) -> tuple[float, float]:
    """Exact k-derivatives (xi', chi') of :func:`xi_chi` at fixed (V, b)."""
    return _xi_chi_prime(derived_quantities(particle, cell))


@dataclass(frozen=True)
class ClosedForm:
    """Every scalar of the closed-form pipeline at one (E, V, b, N) point."""

    xi: float
    chi: float
    xi_prime: float
    chi_prime: float
    q: float
    theta: float
    t: complex
    tau: float


def closed_form(particle: Particle, cell: CellSpec, n_cells: int) -> ClosedForm:
    """Bundle (xi, chi, derivatives, q, theta, t, tau) for one parameter point."""
    xi, chi = xi_chi(particle, cell)
    xi_p, chi_p = xi_chi_prime(particle, cell)
    q = cheb_ratio_q(n_cells, xi) if n_cells >= 1 else 0.0
    return ClosedForm(
        xi=xi,
        chi=chi,
        xi_prime=xi_p,
        chi_prime=chi_p,
        q=q,
        theta=phase_theta(particle, cell, n_cells),
        t=transmission_closed(particle, cell, n_cells),
        tau=tunneling_time(particle, cell, n_cells),
    )


def transmission_closed(particle: Particle, cell: CellSpec, n_cells: int) -> complex:
    """Closed-form transmission t = exp(-i*k*L)/G of the N-cell lattice.

    N = 0 returns exactly 1.  Inside the band G is formed directly from
    T_N and U_{N-1}; outside, the magnitude is pre-sized in the log domain
    so the value is computed without ever materializing an overflowing
    polynomial.

    Raises
    ------
    SpectralSingularityError
        |G| < SINGULARITY_TOL: the lattice lases at this parameter point.
    OverflowGuardError
        beta > BETA_MAX, or |G| itself exceeds double range (the
        transmission magnitude underflows; the asymptotic path applies).
    """
    if n_cells < 0:
        raise ValueError("n_cells must be >= 0")
    if n_cells == 0:
        return 1.0 + 0.0j
    scalars = _cell_scalars(derived_quantities(particle, cell))
    xi, chi = scalars.xi, scalars.chi
    k = particle.k
    length = _span(cell, n_cells)
    if abs(xi) <= 1.0:
        sine, psi = _band_sine_angle(scalars)
        if sine == 0.0:  # exactly on a band edge
            g = complex(cheb_T(n_cells, xi), -chi * cheb_U(n_cells - 1, xi))
        else:
            g = complex(
                math.cos(n_cells * psi),
                -chi * math.sin(n_cells * psi) / sine,
            )
        mag = abs(g)
        if mag < SINGULARITY_TOL:
            raise SpectralSingularityError(mag)
        return cmath.exp(-1j * k * length) / g
    scale = _growth_scale(scalars)
    u = math.asinh(scale)
    q = math.copysign(math.tanh(n_cells * u) / scale, xi)
    nu = n_cells * u
    ln_t = nu - math.log(2.0) + math.log1p(math.exp(-2.0 * nu))
    ln_g = ln_t + 0.5 * math.log1p((chi * q) ** 2)
    if ln_g > _LN_MAX:
        raise OverflowGuardError(
            f"|G| ~ exp({ln_g:.1f}) exceeds double range; "
            "transmission magnitude underflows"
        )
    if ln_g < _LN_DIRECT:
        g = complex(cheb_T(n_cells, xi), -chi * cheb_U(n_cells - 1, xi))
        return cmath.exp(-1j * k * length) / g
    sign_t = cheb_T_sign(n_cells, xi)
    arg_g = math.atan2(-chi * q * sign_t, sign_t)
    return cmath.rect(math.exp(-ln_g), -k * length - arg_g)


def phase_theta(particle: Particle, cell: CellSpec, n_cells: int) -> float:
    """Transmission phase, principal value in (-pi, pi].

    Equals arctan(q*chi) - k*L up to the branch correction that keeps
    exp(i*theta) = t/|t| exactly (the bare arctan form is off by pi wherever
    T_N(xi) < 0).

    Raises ZeroOfTError on roots of T_N, where the arctan parameterization
    jumps by pi.
    """
    if n_cells < 0:
        raise ValueError("n_cells must be >= 0")
    if n_cells == 0:
        return 0.0
    xi, chi = _xi_chi(derived_quantities(particle, cell))
    q = cheb_ratio_q(n_cells, xi)
    sign_t = cheb_T_sign(n_cells, xi)
    raw = -particle.k * _span(cell, n_cells) - math.atan2(-chi * q * sign_t, sign_t)
    wrapped = math.remainder(raw, math.tau)
    return wrapped if wrapped > -math.pi else math.pi


@dataclass(frozen=True)
class TunnelingTimeResult:
    """Stationary-phase time plus which evaluation path produced it.

    ``band_edge_fallback`` is True when |xi^2 - 1| < BAND_EDGE_TOL and the
    removable 0/0 in the time expression was replaced by the exact endpoint
    derivatives of the Chebyshev ratio.
    """

    tau: float
    band_edge_fallback: bool


def tunneling_time_result(
    particle: Particle, cell: CellSpec, n_cells: int
) -> TunnelingTimeResult:
    """Analytic stationary-phase tunneling time for the N-cell lattice.

    Evaluates

        tau = [q*chi' + chi*xi'*(dq/dxi)] / (2k*(1 + (q*chi)^2))

    with dq/dxi = (N - q*xi)/(xi^2 - 1) - N*q^2.  Outside the band every
    factor is built from the bounded ratios chi/s, xi'/s, chi'/s, |xi|/s and
    tanh(N*arccosh|xi|) with s = sqrt(xi^2 - 1), so nothing overflows for
    beta <= BETA_MAX whatever the size of exp(2*beta).

    Raises ZeroOfTError at roots of T_N (use :func:`tunneling_time_fd`
    there) and OverflowGuardError past BETA_MAX.
    """
    if n_cells < 0:
        raise ValueError("n_cells must be >= 0")
    k = particle.k
    if n_cells == 0:
        return TunnelingTimeResult(0.0, False)
    d = derived_quantities(particle, cell)
    scalars = _cell_scalars(d)
    xi, chi = scalars.xi, scalars.chi
    xi_p, chi_p = _xi_chi_prime(d)
    n = n_cells
    quad = scalars.xi_minus_1 * scalars.xi_plus_1  # inf far outside the band is fine
    if abs(quad) < BAND_EDGE_TOL:
        q = math.copysign(float(n), xi)
        dq_dxi = -n * (2.0 * n * n + 1.0) / 3.0
        bracket = q * chi_p + chi * xi_p * dq_dxi
        tau = bracket / (2.0 * k * (1.0 + (q * chi) ** 2))
        return TunnelingTimeResult(tau, True)
    if abs(xi) > 1.0:
        scale = _growth_scale(scalars)
        tt = math.tanh(n * math.asinh(scale))
        sign = 1.0 if xi > 0.0 else -1.0
        cs = chi / scale
        xs = xi_p / scale
        cps = chi_p / scale
        rs = abs(xi) / scale
        q_chi = sign * tt * cs
        bracket = sign * tt * cps + cs * xs * (n - tt * rs - n * tt * tt)
        tau = bracket / (2.0 * k * (1.0 + q_chi * q_chi))
        return TunnelingTimeResult(tau, False)
    sine, psi = _band_sine_angle(scalars)
    cos_n = math.cos(n * psi)
    if abs(cos_n) < ZERO_OF_T_TOL:
        raise ZeroOfTError(n, xi)
    q = math.sin(n * psi) / (sine * cos_n)
    dq_dxi = (n - q * xi) / quad - n * q * q
    bracket = q * chi_p + chi * xi_p * dq_dxi
    tau = bracket / (2.0 * k * (1.0 + (q * chi) ** 2))
    return TunnelingTimeResult(tau, False)


def tunneling_time(particle: Particle, cell: CellSpec, n_cells: int) -> float:
    """Analytic tunneling time; see :func:`tunneling_time_result`."""
    return tunneling_time_result(particle, cell, n_cells).tau


def tunneling_time_fd(
    particle: Particle, cell: CellSpec, n_cells: int, rel_step: float = 1e-6
) -> float:
    """Independent finite-difference tunneling time (the oracle path).

    Central difference of the transmission phase over k*(1 -+ rel_step),
    unwrapped across the stencil by minimal jump, plus the free-passage term:

        tau = (dtheta/dk + L) / (2k).

    This never touches the analytic q/chi machinery, so it checks the entire
    closed-form pipeline end to end.
    """
    if not (1e-9 <= rel_step <= 1e-3):
        raise ValueError("rel_step must lie in [1e-9, 1e-3]")
    if n_cells < 0:
        raise ValueError("n_cells must be >= 0")
    if n_cells == 0:
        return 0.0
    k = particle.k
    dk = rel_step * k
    t_hi = transmission_closed(Particle((k + dk) ** 2), cell, n_cells)
    t_lo = transmission_closed(Particle((k - dk) ** 2), cell, n_cells)
    dtheta = math.remainder(cmath.phase(t_hi) - cmath.phase(t_lo), math.tau)
    length = _span(cell, n_cells)
    return (dtheta / (2.0 * dk) + length) / (2.0 * k)


@dataclass(frozen=True)
class HartmanCoeffs:
    """Coefficients of the thick-cell (b -> infinity) expansions.

    xi ~ f1*exp(2*beta), xi' ~ (f2 + b*f4)*exp(..) + b*f3,
    chi' ~ b*g1 + (b*g2 + g3)*exp(..), chi/xi -> gamma.  f3 and g1 keep an
    oscillatory dependence on b through sin/cos(2*alpha); they are evaluated
    at the supplied width and only feed expansion diagnostics, never the
    final limit.  Satisfies g2 - gamma*f4 = 0 identically.
    """

    f1: float
    f2: float
    f3: float
    f4: float
    g1: float
    g2: float
    g3: float
    gamma: float


def hartman_coeffs(
    particle: Particle, strength: float, width: float = 1.0
) -> HartmanCoeffs:
    """Thick-cell expansion coefficients for potential strength V > 0."""
    if strength <= 0.0:
        raise DegeneratePotentialError(
            "thick-barrier expansion requires strength > 0"
        )
    d = derived_quantities(particle, CellSpec(strength, width))
    k = particle.k
    v = strength
    sin_phi = math.sin(d.phi)
    cos_phi = math.cos(d.phi)
    sin_2phi = math.sin(2.0 * d.phi)
    rho3 = d.rho**3
    osc_factor = k * k * cos_phi * cos_phi + 0.5 * v * sin_2phi
    dec_factor = k * k * sin_phi * sin_phi - 0.5 * v * sin_2phi
    return HartmanCoeffs(
        f1=0.5 * sin_phi * sin_phi,
        f2=0.5 * d.phi_prime * sin_2phi,
        f3=-2.0 * k / rho3 * math.sin(2.0 * d.alpha) * cos_phi * osc_factor,
        f4=k * sin_phi / rho3 * dec_factor,
        g1=k * d.u_plus * math.cos(2.0 * d.alpha) / rho3 * osc_factor,
        g2=k * d.u_minus / (2.0 * rho3) * dec_factor,
        g3=0.25 * (d.phi_prime * d.u_minus * cos_phi + d.u_minus_prime * sin_phi),
        gamma=0.5 * d.u_minus / sin_phi,
    )


def hartman_limit_time(particle: Particle, strength: float) -> float:
    """Saturated tunneling time in the thick-cell limit.

    tau_inf = (g3 - gamma*f2) / (2k*(1 + gamma^2)*f1): independent of both
    the cell width and the repetition count by construction.
    """
    c = hartman_coeffs(particle, strength)
    return (c.g3 - c.gamma * c.f2) / (2.0 * particle.k * (1.0 + c.gamma**2) * c.f1)


def free_propagation_time(particle: Particle, span: float) -> float:
    """Time L/(2k) for a free particle to traverse a length L."""
    if not (math.isfinite(span) and span >= 0.0):
        raise ValueError(f"span must be finite and >= 0, got {span!r}")
    return span / (2.0 * particle.k)


def n_infinity_bracket(particle: Particle, strength: float, span: float) -> float:
    """Many-thin-cells limit of the time, via the intermediate bracket form.

    Evaluates L/(4k*rho^3) * [rho^3 + ((k^4 - V^2)/k^2)*rho*cos(2phi)
    + 2V*rho*sin(2phi)] literally; the bracket collapses to 2*rho^3, so the
    value equals the free-propagation time L/(2k) identically.  Keeping the
    unsimplified form makes the cancellation itself testable.
    """
    if strength < 0.0:
        raise ValueError("strength must be >= 0")
    if not (math.isfinite(span) and span > 0.0):
        raise ValueError(f"span must be finite and > 0, got {span!r}")
    d = derived_quantities(particle, CellSpec(strength, 1.0))
    k = particle.k
    rho3 = d.rho**3
    bracket = (
        rho3
        + (k**4 - strength * strength) / (k * k) * d.rho * math.cos(2.0 * d.phi)
        + 2.0 * strength * d.rho * math.sin(2.0 * d.phi)
    )
    return span / (4.0 * k * rho3) * bracket


def square_barrier_time(particle: Particle, barrier_height: float, span: float) -> float:
    """Stationary-phase time through a single real square barrier (baseline).

    Analytic E-derivative of arctan(((k^2-q^2)/2kq)*tanh(qL)) with
    q = sqrt(V - E); only the tunneling regime V > E is supported.  Saturates
    at 1/(q*k) for thick barriers and vanishes linearly as L -> 0.
    """
    energy = particle.energy
    if barrier_height <= energy:
        raise ValueError("square_barrier_time requires barrier_height > energy")
    if not (math.isfinite(span) and span >= 0.0):
        raise ValueError(f"span must be finite and >= 0, got {span!r}")
    k = particle.k
    q = math.sqrt(barrier_height - energy)
    kq = k * q
    x = q * span
    if x > 700.0:
        th = 1.0
        sech2 = 0.0
    else:
        th = math.tanh(x)
        sech = 1.0 / math.cosh(x)
        sech2 = sech * sech
    two_e_minus_v = 2.0 * energy - barrier_height
    g = two_e_minus_v * th / (2.0 * kq)
    g_prime = (
        barrier_height * barrier_height * th / (4.0 * kq**3)
        - two_e_minus_v * span * sech2 / (4.0 * k * q * q)
    )
    return g_prime / (1.0 + g * g)
