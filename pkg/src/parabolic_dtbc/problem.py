"""Half-line problem definition, meshes, and coefficient sampling.

The continuous problem is rho(x) u_t - (b(x) u_x)_x + c(x) u = f(x, t) on
x > 0 with Dirichlet data g at x = 0, decay at infinity, and initial data
u0.  Beyond a tail onset X0 the coefficients are constant and f, u0
vanish; the solver truncates the axis at X > X0 and closes the scheme at
the last node, so everything here is bookkeeping: node placement, step
arrays, and midpoint sampling of the coefficient callables.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .validation import ExactSolution, u1, u2


def _sample_x(fn: Callable, x: np.ndarray) -> np.ndarray:
    """Evaluate a scalar function of x on an array, vectorized when possible."""
    x = np.asarray(x, dtype=float)
    try:
        y = np.asarray(fn(x), dtype=float)
        if y.shape == x.shape:
            return y.copy()
        if y.shape == ():
            return np.full(x.shape, float(y))
    except (TypeError, ValueError):
        pass
    return np.array([float(fn(float(xi))) for xi in x])


def _sample_xt(fn: Callable, x: np.ndarray, t: float) -> np.ndarray:
    try:
        y = np.asarray(fn(x, t), dtype=float)
        if y.shape == x.shape:
            return y.copy()
        if y.shape == ():
            return np.full(x.shape, float(y))
    except (TypeError, ValueError):
        pass
    return np.array([float(fn(float(xi), float(t))) for xi in x])


@dataclass(frozen=True)
class ProblemSpec:
    """Continuous problem data plus the constants its tail settles into.

    ``rho``, ``b``, ``c`` are callables of x (density, diffusivity,
    reaction), ``f`` of (x, t), ``g`` of t, ``u0`` of x.  For x >= X0 the
    coefficients must equal their tail constants and f, u0 must vanish;
    u0 and f are allowed to be merely below ``tail_tol`` there, since
    physically relevant initial data often only decays.  ``rho_lower`` and
    ``b_lower`` are positive lower bounds used by the stability
    diagnostics.
    """

    rho: Callable
    b: Callable
    c: Callable
    f: Callable
    g: Callable
    u0: Callable
    rho_inf: float
    b_inf: float
    c_inf: float
    X0: float
    X: float
    rho_lower: float
    b_lower: float
    tail_tol: float = 1e-5
    label: str = "custom"

    def __post_init__(self):
        if not (self.rho_inf > 0.0 and self.b_inf > 0.0):
            raise ValueError("tail constants rho_inf and b_inf must be positive")
        if self.c_inf < 0.0:
            raise ValueError("tail constant c_inf must be nonnegative")
        if not (self.rho_lower > 0.0 and self.b_lower > 0.0):
            raise ValueError("lower bounds rho_lower and b_lower must be positive")
        if not 0.0 < self.X0 < self.X:
            raise ValueError("need 0 < X0 < X")


@dataclass(frozen=True, eq=False)
class Mesh:
    """Spatial nodes 0 = x_0 < ... < x_J with a uniform time grid.

    Step arrays are 1-based: ``h[j] = x_j - x_{j-1}`` for 1 <= j <= J and
    ``hbar[j] = (h_j + h_{j+1}) / 2`` for 1 <= j <= J - 1, with the tail
    convention ``hbar[J] = h[J]`` (the mesh continues uniformly past the
    last node).  Slot 0 of either array is NaN.  Time levels are
    ``t_m = m * tau`` for 0 <= m <= M.
    """

    x: np.ndarray
    tau: float
    M: int

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float).copy()
        if x.ndim != 1 or x.size < 3:
            raise ValueError("mesh needs at least two cells (three nodes)")
        if x[0] != 0.0:
            raise ValueError("mesh must start at x = 0")
        steps = np.diff(x)
        if np.any(steps <= 0.0):
            raise ValueError("mesh nodes must be strictly increasing")
        if not self.tau > 0.0:
            raise ValueError("time step must be positive")
        if int(self.M) < 1:
            raise ValueError("need at least one time level")
        J = x.size - 1
        h = np.concatenate(([np.nan], steps))
        hbar = np.full(J + 1, np.nan)
        hbar[1:J] = 0.5 * (h[1:J] + h[2:J + 1])
        hbar[J] = h[J]
        for arr in (x, h, hbar):
            arr.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "M", int(self.M))
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "hbar", hbar)
        object.__setattr__(self, "J", J)

    @property
    def h_tail(self) -> float:
        """Step of the uniform tail (the last step)."""
        return float(self.h[self.J])

    @property
    def T(self) -> float:
        return self.M * self.tau

    def times(self) -> np.ndarray:
        return self.tau * np.arange(self.M + 1)


def build_mesh(X: float, J: int | None = None, *, tau: float, M: int,
               nodes: Sequence[float] | None = None) -> Mesh:
    """Uniform mesh of J cells on [0, X], or an explicit node list.

    An explicit node list must start at 0 and end at X; it is the caller's
    way of grading the mesh toward the left boundary.
    """
    if nodes is None:
        if J is None or int(J) < 2:
            raise ValueError("need J >= 2 cells for a uniform mesh")
        x = np.linspace(0.0, float(X), int(J) + 1)
    else:
        x = np.asarray(list(nodes), dtype=float)
        if abs(x[-1] - X) > 1e-12 * max(1.0, abs(X)):
            raise ValueError("node list must end at the truncation point X")
    return Mesh(x=x, tau=float(tau), M=int(M))


@dataclass(frozen=True, eq=False)
class SampledCoefficients:
    """Midpoint coefficient samples with gridded forcing and initial data.

    ``rho_h[j]``, ``b_h[j]``, ``c_h[j]`` hold the coefficient value at the
    cell midpoint x_{j-1/2} for 1 <= j <= J (slot 0 is NaN).
    ``F[m, j] = f(x_j, t_m)`` for m >= 1 (row 0 is zero) and
    ``U0[j] = u0(x_j)``.
    """

    rho_h: np.ndarray
    b_h: np.ndarray
    c_h: np.ndarray
    F: np.ndarray
    U0: np.ndarray

    def __post_init__(self):
        for arr in (self.rho_h, self.b_h, self.c_h, self.F, self.U0):
            arr.setflags(write=False)


def sample(problem: ProblemSpec, mesh: Mesh) -> SampledCoefficients:
    """Sample a problem onto a mesh, enforcing positivity and tail invariants.

    The tail step must satisfy h_J <= x_J - X0, so that the last midpoint
    already lies in the constant-coefficient region; coefficient samples
    there must equal the tail constants and u0, f must vanish below the
    problem's tail tolerance.
    """
    x, J, M = mesh.x, mesh.J, mesh.M
    x_end = float(x[J])
    if x_end <= problem.X0:
        raise ValueError("mesh must reach past the tail onset X0")
    if mesh.h[J] > x_end - problem.X0 + 1e-12 * max(1.0, x_end):
        raise ValueError(
            f"tail step h_J={mesh.h[J]:.6g} exceeds x_J - X0="
            f"{x_end - problem.X0:.6g}; refine the mesh near the right end")

    xm = 0.5 * (x[:-1] + x[1:])
    nan0 = np.array([np.nan])
    rho_h = np.concatenate((nan0, _sample_x(problem.rho, xm)))
    b_h = np.concatenate((nan0, _sample_x(problem.b, xm)))
    c_h = np.concatenate((nan0, _sample_x(problem.c, xm)))

    if np.min(rho_h[1:]) < problem.rho_lower:
        raise ValueError("density sample below its declared lower bound")
    if np.min(b_h[1:]) < problem.b_lower:
        raise ValueError("diffusivity sample below its declared lower bound")
    if np.min(c_h[1:]) < 0.0:
        raise ValueError("reaction coefficient sample is negative")

    tail_mid = xm >= problem.X0 - 1e-12
    for name, arr, const in (("rho", rho_h[1:], problem.rho_inf),
                             ("b", b_h[1:], problem.b_inf),
                             ("c", c_h[1:], problem.c_inf)):
        dev = np.max(np.abs(arr[tail_mid] - const)) if np.any(tail_mid) else 0.0
        if dev > 1e-12 * (1.0 + abs(const)):
            raise ValueError(f"coefficient {name} is not constant on the tail "
                             f"(max deviation {dev:.3g})")

    U0 = _sample_x(problem.u0, x)
    tail_nodes = x >= problem.X0 - 1e-12
    if np.max(np.abs(U0[tail_nodes])) > problem.tail_tol:
        raise ValueError("initial data does not vanish on the tail "
                         f"(tolerance {problem.tail_tol:g})")

    F = np.zeros((M + 1, J + 1))
    for m in range(1, M + 1):
        F[m] = _sample_xt(problem.f, x, m * mesh.tau)
    if np.max(np.abs(F[1:, tail_nodes])) > problem.tail_tol:
        raise ValueError("forcing does not vanish on the tail "
                         f"(tolerance {problem.tail_tol:g})")

    try:
        g0 = float(problem.g(0.0))
    except (TypeError, ValueError, ZeroDivisionError):
        g0 = None
    if g0 is not None and abs(U0[0] - g0) > 1e-10 * (1.0 + abs(g0)):
        warnings.warn(
            f"initial and boundary data disagree at the corner: u0(0)={U0[0]:.6g}"
            f" vs g(0)={g0:.6g}; proceeding with the sampled initial value",
            stacklevel=2)

    return SampledCoefficients(rho_h=rho_h, b_h=b_h, c_h=c_h, F=F, U0=U0)


# ---------------------------------------------------------------------------
# presets
# ---------------------------------------------------------------------------

def _const(value: float) -> Callable:
    return lambda x: np.full(np.shape(x), value, dtype=float)


def _zero_xt(x, t):
    return np.zeros(np.shape(x), dtype=float)


def example1(x_star: float = 1.25, t0: float = 0.03125
             ) -> tuple[ProblemSpec, ExactSolution]:
    """Gaussian pulse on the homogeneous heat equation, truncated at X = 2.5.

    The initial profile does not vanish identically beyond the truncation
    point; its values there stay below 1e-5 and are treated as zero under
    the tail tolerance (about 3.7e-6 at x = 2.5 for the default pulse).
    """
    exact = ExactSolution(label="example1",
                          fn=lambda x, t: u1(x, t, x_star=x_star, t0=t0))
    prob = ProblemSpec(
        rho=_const(1.0), b=_const(1.0), c=_const(0.0), f=_zero_xt,
        g=lambda t: u1(0.0, t, x_star=x_star, t0=t0),
        u0=lambda x: u1(x, 0.0, x_star=x_star, t0=t0),
        rho_inf=1.0, b_inf=1.0, c_inf=0.0,
        X0=2.45, X=2.5, rho_lower=1.0, b_lower=1.0,
        label="example1")
    return prob, exact


def example2() -> tuple[ProblemSpec, ExactSolution]:
    """Quadratic boundary ramp g = t^2 with zero initial data, X = 1.

    The solution is markedly nonzero at the truncation point, which makes
    this the stress test for the boundary closure.
    """
    exact = ExactSolution(label="example2", fn=u2)
    prob = ProblemSpec(
        rho=_const(1.0), b=_const(1.0), c=_const(0.0), f=_zero_xt,
        g=lambda t: float(t) ** 2,
        u0=_const(0.0),
        rho_inf=1.0, b_inf=1.0, c_inf=0.0,
        X0=0.1, X=1.0, rho_lower=1.0, b_lower=1.0,
        label="example2")
    return prob, exact


PRESETS = {"example1": example1, "example2": example2}
