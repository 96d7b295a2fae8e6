"""Adaptive Simpson integration for smooth scalar integrands.

The range is cut into equal starting panels (one per noise deviation at the
call sites) so narrow mixture peaks are never skipped by the first coarse
Simpson estimate; each panel is then refined with an explicit stack.
"""

import math
from collections.abc import Callable
from itertools import pairwise

import numpy as np

from precoder.exceptions import QuadratureNoConvergence


def _simpson(fa: float, fm: float, fb: float, width: float) -> float:
    return width / 6.0 * (fa + 4.0 * fm + fb)


def integrate_adaptive_simpson(
    f: Callable[[float], float],
    a: float,
    b: float,
    tol: float = 1e-10,
    max_subdivisions: int = 2**20,
    panels: int = 1,
) -> tuple[float, float]:
    """Integrate f over [a, b] to absolute tolerance `tol`.

    Args:
        f: Scalar integrand.
        a: Lower bound.
        b: Upper bound.
        tol: Absolute error tolerance, shared between panels in proportion to width.
        max_subdivisions: Interval splits allowed before giving up.
        panels: Number of equal starting panels.

    Returns:
        Tuple of (integral_value, error_estimate).

    Raises:
        QuadratureNoConvergence: If more than `max_subdivisions` splits are needed.
    """
    if a == b:
        return 0.0, 0.0
    if a > b:
        value, error = integrate_adaptive_simpson(f, b, a, tol, max_subdivisions, panels)
        return -value, error

    span = b - a
    min_width = span * 1e-13
    pieces: list[float] = []
    error = 0.0
    splits = 0

    for lo, hi in pairwise(np.linspace(a, b, max(1, panels) + 1).tolist()):
        flo, fhi = f(lo), f(hi)
        fmid = f(0.5 * (lo + hi))
        stack = [(lo, hi, flo, fmid, fhi, _simpson(flo, fmid, fhi, hi - lo), tol * (hi - lo) / span)]
        while stack:
            lo, hi, flo, fmid, fhi, whole, eps = stack.pop()
            mid = 0.5 * (lo + hi)
            flm = f(0.5 * (lo + mid))
            frm = f(0.5 * (mid + hi))
            left = _simpson(flo, flm, fmid, mid - lo)
            right = _simpson(fmid, frm, fhi, hi - mid)
            delta = left + right - whole
            if abs(delta) <= 15.0 * eps or hi - lo < min_width:
                # Richardson extrapolation
                pieces.append(left + right + delta / 15.0)
                error += abs(delta) / 15.0
                continue
            splits += 1
            if splits > max_subdivisions:
                raise QuadratureNoConvergence(
                    f"adaptive Simpson exceeded {max_subdivisions} subdivisions on [{a:.6g}, {b:.6g}]"
                )
            stack.append((lo, mid, flo, flm, fmid, left, 0.5 * eps))
            stack.append((mid, hi, fmid, frm, fhi, right, 0.5 * eps))

    return math.fsum(pieces), error
