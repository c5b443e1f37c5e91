"""Convolution kernel of the discrete transparent boundary condition.

The exact closure of the truncated scheme at the last node is a time
convolution with a real kernel sequence ``R[0..M]``.  The kernel depends
only on the constant-coefficient tail of the problem, the tail step, the
time step and the two scheme weights.  Three constructions are provided:

* :func:`kernel_by_recurrence`, the O(M) production path,
* :func:`kernel_by_legendre`, the closed form via a modified Legendre
  three-term recurrence (testing),
* :func:`kernel_gf_oracle`, a contour-integral extraction of the power
  series coefficients of the kernel's generating function (testing).

All three agree; the recurrence is what the stepper consumes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class BranchCutError(RuntimeError):
    """Contour of the generating-function oracle crossed the branch cut."""


@dataclass(frozen=True)
class KernelParams:
    """Scalar data deriving the boundary kernel.

    ``a1, a0`` are the dimensionless step ratios of the tail scheme,
    ``d0 = a0/a1`` and ``d1 = 2/a1`` their convenient rescalings, and
    ``alpha, beta, delta`` the parameters of the kernel recurrence.  The
    auxiliary square-root factors with product ``alpha`` and cross product
    ``beta`` can be imaginary when ``alpha < 0``; they are never stored,
    only the always-real products enter any computation.  ``sigma0`` is
    the weight at which the generating-function denominator degenerates
    at the origin; the recurrence itself is continuous through it (it is
    None when undefined).
    """

    sigma: float
    theta: float
    h: float
    tau: float
    rho_inf: float
    b_inf: float
    c_inf: float
    a1: float
    a0: float
    d0: float
    d1: float
    alpha0: float
    alpha1: float
    alpha: float
    beta: float
    delta: float
    sigma0: float | None

    def __post_init__(self):
        assert self.a1 > 0.0 and self.a0 >= 0.0
        assert self.d1 > 0.0 and self.d0 >= 0.0
        if self.delta <= 0.0:
            raise ValueError(f"degenerate kernel parameters: delta={self.delta} <= 0")

    @property
    def scale(self) -> float:
        """Magnitude of the leading kernel entry, 2 a1 sqrt(delta)."""
        return 2.0 * self.a1 * math.sqrt(self.delta)


def derive_params(rho_inf: float, b_inf: float, c_inf: float,
                  h: float, tau: float,
                  sigma: float, theta: float) -> KernelParams:
    """Derive the kernel parameters from tail constants and step sizes.

    Requires sigma >= 1/2 and theta <= 1/4, the regime in which the
    boundary convolution is dissipative; smaller sigma is rejected as
    unsupported.
    """
    if not (rho_inf > 0.0 and b_inf > 0.0):
        raise ValueError("tail constants rho_inf and b_inf must be positive")
    if c_inf < 0.0:
        raise ValueError("tail constant c_inf must be nonnegative")
    if not (h > 0.0 and tau > 0.0):
        raise ValueError("step sizes must be positive")
    if sigma < 0.5 - 1e-14:
        raise ValueError(
            f"sigma={sigma} unsupported: boundary dissipativity needs sigma >= 1/2")
    if theta > 0.25 + 1e-14:
        raise ValueError(f"theta={theta} unsupported: need theta <= 1/4")

    a1 = h * h * rho_inf / (2.0 * tau * b_inf)
    a0 = h * h * c_inf / (2.0 * b_inf)
    d0 = (c_inf / rho_inf) * tau
    d1 = 4.0 * (b_inf / rho_inf) * tau / (h * h)
    one4t = 1.0 - 4.0 * theta
    alpha0 = 1.0 - d0 / (1.0 + sigma * d0)
    alpha1 = 1.0 - (d0 * one4t + d1) / ((1.0 + sigma * d0) * one4t + sigma * d1)
    alpha = alpha0 * alpha1
    beta = 0.5 * (alpha0 + alpha1)
    delta = (1.0 + sigma * d0) * ((1.0 + sigma * d0) * one4t + sigma * d1)
    if delta <= 0.0:
        raise ValueError(f"degenerate kernel parameters: delta={delta} <= 0")
    denom = 1.0 - 2.0 * a0 * theta
    sigma0 = (2.0 * a1 * theta / denom) if denom != 0.0 else None
    return KernelParams(sigma=sigma, theta=theta, h=h, tau=tau,
                        rho_inf=rho_inf, b_inf=b_inf, c_inf=c_inf,
                        a1=a1, a0=a0, d0=d0, d1=d1,
                        alpha0=alpha0, alpha1=alpha1,
                        alpha=alpha, beta=beta, delta=delta, sigma0=sigma0)


def params_from_ratios(d0: float, d1: float, sigma: float, theta: float,
                       h: float = 1.0, tau: float = 1.0) -> KernelParams:
    """Build parameters directly from the step ratios d0, d1.

    Synthesizes tail constants reproducing the requested ratios with unit
    diffusivity; convenient for parameter sweeps.
    """
    if d1 <= 0.0 or d0 < 0.0:
        raise ValueError("need d1 > 0 and d0 >= 0")
    a1 = 2.0 / d1
    rho_inf = 2.0 * a1 * tau / (h * h)
    c_inf = 2.0 * d0 * a1 / (h * h)
    return derive_params(rho_inf, 1.0, c_inf, h, tau, sigma, theta)


@dataclass(frozen=True, eq=False)
class Kernel:
    """Real convolution kernel ``R[0..M]`` with its generating parameters."""

    R: np.ndarray
    params: KernelParams

    def __post_init__(self):
        R = np.asarray(self.R, dtype=float)
        if R.ndim != 1 or R.size < 2:
            raise ValueError("kernel needs entries R[0] and R[1] at least")
        scale = self.params.scale
        if abs(R[0] + scale) > 1e-12 * scale:
            raise ValueError("kernel head R[0] inconsistent with its parameters")
        if abs(R[1] - scale * self.params.beta) > 1e-12 * scale:
            raise ValueError("kernel head R[1] inconsistent with its parameters")
        R.setflags(write=False)
        object.__setattr__(self, "R", R)

    @property
    def length(self) -> int:
        return self.R.size - 1


def kernel_by_recurrence(params: KernelParams, M: int) -> Kernel:
    """Generate ``R[0..M]`` by the three-term kernel recurrence (production path)."""
    if M < 1:
        raise ValueError("need at least M = 1 kernel entries")
    alpha, beta = params.alpha, params.beta
    R = np.empty(M + 1)
    r2 = -params.scale
    r1 = params.scale * beta
    R[0], R[1] = r2, r1
    for m in range(2, M + 1):
        r = ((2 * m - 3) * beta * r1 - (m - 3) * alpha * r2) / m
        R[m] = r
        r2, r1 = r1, r
    return Kernel(R=R, params=params)


def kernel_by_legendre(params: KernelParams, M: int) -> Kernel:
    """Generate ``R[0..M]`` from the modified Legendre closed form (testing path).

    The modified polynomials p_m obey p_m = ((2m-1) beta p_{m-1}
    - (m-1) alpha p_{m-2}) / m with p_0 = 1 and p_m = 0 for m < 0; the
    kernel entry is scale * (p_m - alpha p_{m-2}) / (2m - 1).
    """
    if M < 1:
        raise ValueError("need at least M = 1 kernel entries")
    alpha, beta, scale = params.alpha, params.beta, params.scale
    R = np.empty(M + 1)
    p2 = 0.0   # p_{m-2}
    p1 = 0.0   # p_{m-1}
    p0 = 1.0   # p_m at m = 0
    R[0] = scale * (p0 - alpha * p2) / (-1.0)
    for m in range(1, M + 1):
        p2, p1 = p1, p0
        p0 = ((2 * m - 1) * beta * p1 - (m - 1) * alpha * p2) / m
        R[m] = scale * (p0 - alpha * p2) / (2 * m - 1)
    return Kernel(R=R, params=params)


def kernel_gf_oracle(params: KernelParams, m_max: int,
                     radius: float = 0.05, quad_points: int = 4096,
                     max_halvings: int = 6) -> np.ndarray:
    """Extract ``R[0..m_max]`` from the generating function by contour quadrature.

    The kernel's generating function is -scale * sqrt(alpha z^2 - 2 beta z + 1)
    with the principal square-root branch; its m-th Taylor coefficient is
    recovered as a trapezoid average of p(z) z^{-m} over the circle
    |z| = radius.  The average is evaluated in extended precision because
    the integrand magnitude grows like radius^{-m} while the coefficient
    stays O(1).  If the quadratic factor touches the branch cut (negative
    real axis) on the contour, the radius is halved and the quadrature
    retried; after ``max_halvings`` failures a :class:`BranchCutError` is
    raised.  Independent of both recurrence constructions by design.
    """
    import mpmath as mp

    if m_max < 0:
        raise ValueError("need m_max >= 0")
    if not 0.0 < radius < 1.0:
        raise ValueError("contour radius must lie in (0, 1)")
    if quad_points < 4 or quad_points % 2:
        raise ValueError("need an even number of quadrature points >= 4")

    for _ in range(max_halvings + 1):
        try:
            return _gf_quadrature(mp, params, m_max, radius, quad_points)
        except BranchCutError:
            radius *= 0.5
    raise BranchCutError(
        "generating-function quadrature kept crossing the branch cut; "
        "kernel parameters may be outside the supported regime")


def _gf_quadrature(mp, params, m_max, radius, N):
    # Working precision absorbs the radius**-m_max dynamic range of the
    # integrand plus the target 1e-8 absolute accuracy with margin.
    dps = 25 + int(math.ceil(max(m_max, 1) * math.log10(1.0 / radius))) + 10
    with mp.workdps(dps):
        alpha = mp.mpf(params.alpha)
        beta = mp.mpf(params.beta)
        scale = -2 * mp.mpf(params.a1) * mp.sqrt(mp.mpf(params.delta))
        r = mp.mpf(radius)
        half = N // 2
        # Conjugate symmetry: the generating function has real coefficients,
        # so the full-circle trapezoid sum equals the endpoint samples plus
        # twice the real part of the upper half circle.
        z = [r * mp.e ** (2j * mp.pi * k / N) for k in range(half + 1)]
        w = [alpha * zk * zk - 2 * beta * zk + 1 for zk in z]
        for k in range(half):
            wa, wb = w[k], w[k + 1]
            crosses = (wa.imag * wb.imag < 0) or (wa.imag == 0 and wa.real <= 0) \
                or (wb.imag == 0 and wb.real <= 0)
            if crosses and (wa.real < 0 or wb.real < 0):
                raise BranchCutError(
                    f"branch cut crossed on contour |z| = {radius}")
        p = [scale * mp.sqrt(wk) for wk in w]
        inv = [1 / zk for zk in z]
        pw = [mp.mpc(1) for _ in z]
        out = np.empty(m_max + 1)
        for m in range(m_max + 1):
            acc = (p[0] * pw[0]).real + (p[half] * pw[half]).real
            acc += 2 * mp.fsum((p[k] * pw[k]).real for k in range(1, half))
            out[m] = float(acc / N)
            if m < m_max:
                for k in range(half + 1):
                    pw[k] *= inv[k]
        return out


def convolve(kernel: Kernel, history, m: int) -> float:
    """Boundary convolution value at level m from history ``Phi[0..m]``.

    Returns sum_{q=0..m} R[q] Phi[m-q] / (2 h); the q = m term pairs the
    oldest history value (the sampled initial boundary value) with R[m].
    """
    history = np.asarray(history, dtype=float)
    if history.size < m + 1:
        raise ValueError(f"history too short for level m={m}")
    if kernel.length < m:
        raise ValueError(f"kernel of length {kernel.length} too short for level m={m}")
    acc = float(np.dot(kernel.R[:m + 1], history[m::-1]))
    return acc / (2.0 * kernel.params.h)


def convolve_all(kernel: Kernel, history) -> np.ndarray:
    """Boundary convolution at every level 0..len(history)-1 in one pass."""
    history = np.asarray(history, dtype=float)
    n = history.size
    if kernel.length < n - 1:
        raise ValueError("kernel too short for the supplied history")
    full = np.convolve(kernel.R[:n], history)[:n]
    return full / (2.0 * kernel.params.h)
