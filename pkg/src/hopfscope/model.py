"""Three-mode combustion-interface model and its Hopf normal coordinates.

The model tracks the velocity of a burning interface (``v1``) and the two
leading coefficients of the temperature profile (``v2``, ``v3``).  Its
equilibrium at the origin loses stability through an Andronov-Hopf
bifurcation as the kinetic parameter ``nu`` crosses ``nu_AH = 1/3``; this
module locates that point, builds the linear change of basis that
block-diagonalizes the Jacobian, and exposes the vector field in the
resulting normal coordinates ``(x1, x2, x3)`` where the linear part is
``diag(real_eig, [[alpha, -b], [b, alpha]])``.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, RootFindError

__all__ = [
    "KineticParams",
    "LinearData",
    "HopfLocation",
    "NormalForm",
    "kinetic",
    "kinetic_deriv",
    "rhs_original",
    "jacobian_origin",
    "eigen_split",
    "alpha_of_nu",
    "find_hopf_nu",
    "normal_transform",
    "nu_of_alpha",
    "normal_form",
    "rhs_normal",
]

#: Search bracket for the Hopf value of nu.  Below ~0.21 the Jacobian
#: spectrum is entirely real and alpha_of_nu is undefined.
HOPF_BRACKET = (0.2, 0.5)


@dataclass(frozen=True)
class KineticParams:
    """Control parameters of the interface kinetics."""

    nu: float
    p: float

    def __post_init__(self):
        if not (self.nu > 0):
            raise DomainError(f"nu must be positive, got {self.nu}")
        if not (self.p > 0):
            raise DomainError(f"p must be positive, got {self.p}")


def kinetic(v, p):
    """Kinetic function k(v) = ((1-v)^p - (1-v)^(-1)) / (p+1).

    Defined for ``v < 1``; singular at ``v = 1``.
    """
    v = np.asarray(v, dtype=float)
    if np.any(v >= 1.0):
        raise DomainError("kinetic(v, p) requires v < 1")
    one_mv = 1.0 - v
    out = (one_mv**p - 1.0 / one_mv) / (p + 1.0)
    return float(out) if out.ndim == 0 else out


def kinetic_deriv(v, p):
    """Closed-form derivative k'(v) = -(p(1-v)^(p-1) + (1-v)^(-2)) / (p+1)."""
    v = np.asarray(v, dtype=float)
    if np.any(v >= 1.0):
        raise DomainError("kinetic_deriv(v, p) requires v < 1")
    one_mv = 1.0 - v
    out = -(p * one_mv ** (p - 1.0) + one_mv**-2.0) / (p + 1.0)
    return float(out) if out.ndim == 0 else out


def rhs_original(state, params: KineticParams) -> np.ndarray:
    """Time derivative of ``(v1, v2, v3)`` in the original coordinates."""
    v1, v2, v3 = float(state[0]), float(state[1]), float(state[2])
    nu, p = params.nu, params.p
    if v1 >= 1.0:
        raise DomainError(f"v1 = {v1} >= 1: kinetic function singular")
    one_mv = 1.0 - v1
    q = one_mv**p
    k = (q - 1.0 / one_mv) / (p + 1.0)
    kp = -(p * q / one_mv + one_mv**-2.0) / (p + 1.0)
    if kp == 0.0:
        raise DomainError("k'(v1) = 0: first equation degenerate")
    dv1 = (3.0 * (v3 + v2 - v1) - nu * k - v1 * v1) / (nu * kp)
    dv2 = v3 - v1
    dv3 = 9.0 * (v1 - v3) - 6.0 * v2 + nu * (v1 + 1.0) * k + 2.0 * v1 * v1
    return np.array([dv1, dv2, dv3])


def jacobian_origin(nu: float) -> np.ndarray:
    """Jacobian of the original vector field at the equilibrium (0,0,0)."""
    if nu == 0:
        raise DomainError("jacobian_origin undefined at nu = 0")
    return np.array(
        [
            [(3.0 - nu) / nu, -3.0 / nu, -3.0 / nu],
            [-1.0, 0.0, 1.0],
            [9.0 - nu, -6.0, -9.0],
        ]
    )


def eigen_split(nu: float):
    """Split the spectrum of ``jacobian_origin(nu)`` into real + complex pair.

    Returns
    -------
    lam_real : float
        The real eigenvalue.
    lam_cx : complex
        The complex eigenvalue with positive imaginary part.
    v_real : ndarray
        Real eigenvector for ``lam_real``.
    w_cx : ndarray
        Complex eigenvector for ``lam_cx``.

    Raises
    ------
    DomainError
        If the spectrum has no complex-conjugate pair (it degenerates below
        ``nu ~ 0.21``), so the real/pair split does not exist.
    """
    w, V = np.linalg.eig(jacobian_origin(nu))
    imag = np.abs(w.imag)
    scale = np.max(np.abs(w))
    if np.max(imag) <= 1e-9 * scale:
        raise DomainError(f"spectrum of A({nu}) is entirely real; no Hopf pair")
    i_real = int(np.argmin(imag))
    others = [i for i in range(3) if i != i_real]
    if imag[i_real] > 1e-9 * scale or any(imag[i] <= 1e-9 * scale for i in others):
        raise DomainError(f"spectrum of A({nu}) is not one real value plus a pair")
    i_pos = others[0] if w[others[0]].imag > 0 else others[1]
    return float(w[i_real].real), complex(w[i_pos]), V[:, i_real].real, V[:, i_pos]


def alpha_of_nu(nu: float) -> float:
    """Real part of the complex eigenvalue pair, as a function of nu."""
    return eigen_split(nu)[1].real


@dataclass(frozen=True)
class HopfLocation:
    """Root of alpha_of_nu together with the data checked at the root."""

    nu: float
    beta: float
    real_eig: float
    alpha_residual: float
    a_prime: float


def find_hopf_nu(bracket=HOPF_BRACKET, tol: float = 1e-12) -> HopfLocation:
    """Locate the Hopf value of nu by bracketing + bisection/secant.

    Scans ``bracket`` for a sign change of the pair's real part (skipping
    nu values where the pair does not exist), then polishes with brentq.
    Also evaluates the transversality derivative a'(nu) at the root.
    """
    from scipy.optimize import brentq

    grid = np.linspace(bracket[0], bracket[1], 61)
    vals = []
    for nu in grid:
        try:
            vals.append(alpha_of_nu(nu))
        except DomainError:
            vals.append(None)
    lo = hi = None
    for i in range(len(grid) - 1):
        a, b = vals[i], vals[i + 1]
        if a is not None and b is not None and a * b < 0:
            lo, hi = grid[i], grid[i + 1]
            break
    if lo is None:
        raise RootFindError(f"no sign change of Re(pair) in bracket {bracket}")
    nu_root = brentq(alpha_of_nu, lo, hi, xtol=tol)
    lam_real, lam_cx, _, _ = eigen_split(nu_root)
    h = 1e-6
    a_prime = (alpha_of_nu(nu_root + h) - alpha_of_nu(nu_root - h)) / (2 * h)
    return HopfLocation(
        nu=float(nu_root),
        beta=lam_cx.imag,
        real_eig=lam_real,
        alpha_residual=abs(lam_cx.real),
        a_prime=a_prime,
    )


@functools.lru_cache(maxsize=1)
def _hopf_nu() -> float:
    return find_hopf_nu().nu


@dataclass(frozen=True)
class LinearData:
    """Linearization data and the normal-coordinate change of basis.

    ``T`` conjugates the Jacobian to ``diag(real_eig, [[alpha, -beta],
    [beta, alpha]])``; its columns are the unit real eigenvector followed by
    a phase-pinned basis of the complex pair's invariant plane.
    """

    nu_ah: float
    nu: float
    alpha: float
    beta: float
    real_eig: float
    T: np.ndarray
    T_inv: np.ndarray

    @property
    def block(self) -> np.ndarray:
        return np.array(
            [
                [self.real_eig, 0.0, 0.0],
                [0.0, self.alpha, -self.beta],
                [0.0, self.beta, self.alpha],
            ]
        )


def _pin_phase(w: np.ndarray):
    """Rotate a complex eigenvector so Re(w) and Im(w) are orthogonal.

    Among the phases achieving orthogonality, pick |Re| >= |Im| and a
    positive first nonzero component of Re(w); scale Re(w) to unit norm.
    This makes the change of basis unique and reproducible.
    """
    u, v = w.real.copy(), w.imag.copy()
    psi = 0.5 * math.atan2(2.0 * float(u @ v), float(u @ u - v @ v))
    u2 = u * math.cos(psi) + v * math.sin(psi)
    v2 = -u * math.sin(psi) + v * math.cos(psi)
    if np.linalg.norm(u2) < np.linalg.norm(v2):
        u2, v2 = v2, -u2
    nz = int(np.flatnonzero(np.abs(u2) > 1e-12)[0])
    if u2[nz] < 0:
        u2, v2 = -u2, -v2
    s = np.linalg.norm(u2)
    return u2 / s, v2 / s


def normal_transform(nu: float) -> LinearData:
    """Build the change of basis to normal coordinates at parameter nu."""
    lam_real, lam_cx, v_real, w_cx = eigen_split(nu)
    a, b = lam_cx.real, lam_cx.imag  # b > 0 by eigen_split's ordering
    u, v = _pin_phase(w_cx)
    v_real = v_real / np.linalg.norm(v_real)
    nz = int(np.flatnonzero(np.abs(v_real) > 1e-12)[0])
    if v_real[nz] < 0:
        v_real = -v_real
    # Columns (u, -v) satisfy A u = a u + b (-v) ... giving [[a, -b], [b, a]].
    T = np.column_stack([v_real, u, -v])
    T_inv = np.linalg.inv(T)
    return LinearData(
        nu_ah=_hopf_nu(),
        nu=float(nu),
        alpha=a,
        beta=b,
        real_eig=lam_real,
        T=T,
        T_inv=T_inv,
    )


def nu_of_alpha(alpha: float, tol: float = 1e-13) -> float:
    """Invert alpha_of_nu near the Hopf point (Newton, bisection fallback)."""
    nu = _hopf_nu()
    h = 1e-7
    for _ in range(60):
        f = alpha_of_nu(nu) - alpha
        if abs(f) < tol:
            return float(nu)
        df = (alpha_of_nu(nu + h) - alpha_of_nu(nu - h)) / (2 * h)
        step = f / df
        nu_next = nu - step
        if not (HOPF_BRACKET[0] < nu_next < HOPF_BRACKET[1] + 0.2):
            break
        nu = nu_next
        if abs(step) < 1e-15:
            return float(nu)
    # Bisection fallback over the full bracket.
    from scipy.optimize import brentq

    def g(n):
        try:
            return alpha_of_nu(n) - alpha
        except DomainError:
            return math.nan

    grid = np.linspace(0.215, 0.6, 120)
    vals = [g(n) for n in grid]
    for i in range(len(grid) - 1):
        a_, b_ = vals[i], vals[i + 1]
        if math.isnan(a_) or math.isnan(b_):
            continue
        if a_ == 0.0:
            return float(grid[i])
        if a_ * b_ < 0:
            return float(brentq(g, grid[i], grid[i + 1], xtol=tol))
    raise RootFindError(f"alpha = {alpha} not attained by the eigenvalue pair")


class NormalForm:
    """Combustion vector field in normal coordinates, built for speed.

    Instances are callables with the ``(t, x)`` signature expected by ODE
    solvers; ``field(x)`` evaluates without the time argument.  The linear
    part of the field is the block ``diag(real_eig, [[alpha, -beta],
    [beta, alpha]])``; ``nonlinear(x)`` returns the remainder, which
    vanishes at the origin together with its Jacobian.
    """

    def __init__(self, alpha: float, p: float, nu: float | None = None):
        if nu is None:
            nu = nu_of_alpha(alpha)
        self.linear = normal_transform(nu)
        self.nu = float(nu)
        self.p = float(p)
        self.alpha = self.linear.alpha
        self.beta = self.linear.beta
        self.real_eig = self.linear.real_eig
        KineticParams(nu=self.nu, p=self.p)  # validate
        # unpack matrices to plain floats for the hot path
        (
            (self._t11, self._t12, self._t13),
            (self._t21, self._t22, self._t23),
            (self._t31, self._t32, self._t33),
        ) = self.linear.T.tolist()
        (
            (self._s11, self._s12, self._s13),
            (self._s21, self._s22, self._s23),
            (self._s31, self._s32, self._s33),
        ) = self.linear.T_inv.tolist()

    def __call__(self, t, x):
        x1, x2, x3 = float(x[0]), float(x[1]), float(x[2])
        v1 = self._t11 * x1 + self._t12 * x2 + self._t13 * x3
        v2 = self._t21 * x1 + self._t22 * x2 + self._t23 * x3
        v3 = self._t31 * x1 + self._t32 * x2 + self._t33 * x3
        if v1 >= 1.0:
            raise DomainError(f"v1 = {v1} >= 1: kinetic function singular")
        nu, p = self.nu, self.p
        one_mv = 1.0 - v1
        q = one_mv**p
        k = (q - 1.0 / one_mv) / (p + 1.0)
        kp = -(p * q / one_mv + 1.0 / (one_mv * one_mv)) / (p + 1.0)
        f1 = (3.0 * (v3 + v2 - v1) - nu * k - v1 * v1) / (nu * kp)
        f2 = v3 - v1
        f3 = 9.0 * (v1 - v3) - 6.0 * v2 + nu * (v1 + 1.0) * k + 2.0 * v1 * v1
        return [
            self._s11 * f1 + self._s12 * f2 + self._s13 * f3,
            self._s21 * f1 + self._s22 * f2 + self._s23 * f3,
            self._s31 * f1 + self._s32 * f2 + self._s33 * f3,
        ]

    def field(self, x) -> np.ndarray:
        return np.array(self(0.0, x))

    def nonlinear(self, x) -> np.ndarray:
        """h(x): the field minus its exact linear block."""
        x = np.asarray(x, dtype=float)
        return self.field(x) - self.linear.block @ x

    def to_original(self, x) -> np.ndarray:
        return self.linear.T @ np.asarray(x, dtype=float)

    def from_original(self, v) -> np.ndarray:
        return self.linear.T_inv @ np.asarray(v, dtype=float)


@functools.lru_cache(maxsize=256)
def normal_form(alpha: float, p: float) -> NormalForm:
    """Cached NormalForm factory keyed on (alpha, p)."""
    return NormalForm(alpha=alpha, p=p)


def rhs_normal(x, alpha: float, p: float) -> np.ndarray:
    """One-shot evaluation of the normal-coordinate vector field."""
    return normal_form(alpha, p).field(x)
