from __future__ import annotations

from pttunnel import CellSpec, Particle, xi_chi


def bisect_width_for_xi(
    particle: Particle,
    strength: float,
    target: float,
    lo: float,
    hi: float,
    iters: int = 200,
) -> float:
    """Width b in (lo, hi) where xi(b) = target, assuming one sign change."""

    def offset(width: float) -> float:
        return xi_chi(particle, CellSpec(strength, width))[0] - target

    f_lo = offset(lo)
    f_hi = offset(hi)
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if f_lo * f_hi > 0.0:
        raise AssertionError(f"no sign change of xi - {target} on [{lo}, {hi}]")
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        f_mid = offset(mid)
        if f_mid == 0.0:
            return mid
        if f_lo * f_mid < 0.0:
            hi = mid
        else:
            lo, f_lo = mid, f_mid
    return 0.5 * (lo + hi)
