"""Closed-form asymptotics near the Hopf point.

Everything here is driven by the Taylor data of the normal-coordinate
field: the angular trigonometric polynomials entering the slow radial
drift, the slow-manifold graph ``x1 = U(theta) rho^2``, the first Lyapunov
coefficient ``gamma``, the leading-order periodic orbit and its
curvature/torsion, the near-focus transit-time estimate, the interspike-
interval bounds, and the one-dimensional amplitude map ``G``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, FitError
from .taylor import TaylorData
from .trig import TrigPoly, power_to_trig

__all__ = [
    "HopfAsymptotics",
    "IsiBounds",
    "build_trig_polys",
    "rotation_rate_poly",
    "p1_poly",
    "xi0_poly",
    "u_poly",
    "slow_manifold_constants",
    "lyapunov1",
    "hopf_asymptotics",
    "orbit_approx",
    "curvature_torsion",
    "transit_time",
    "isi_bounds",
    "analytic_map_G",
    "map_G_deriv",
    "fixed_point_G",
    "fit_second_lyapunov",
    "corrected_action",
    "measure_transit_time",
]


def build_trig_polys(td: TaylorData) -> dict:
    """Angular polynomials of the slow equations, keyed P1, Q1, Q2, Q3.

    P1 drives the slow-manifold graph; Q1 is the quadratic in-plane radial
    forcing; Q2 couples the radial drift to x1; Q3 is the effective cubic
    radial drift.  Q3 includes, besides the in-plane cubic terms, the
    quadratic cross term -Q1*L1/beta generated when time is traded for the
    rotation angle (the angular rate is beta + rho*L1(theta) at quadratic
    order), without which the radial drift misses the quadratic-pair
    interactions.
    """
    beta = td.beta
    a = td.quad["a"]
    b = td.quad["b"]
    cq = td.quad["c"]
    bc = td.cubic["b"]
    cc = td.cubic["c"]

    p1 = power_to_trig(
        beta, {(2, 0): a[(2, 2)], (1, 1): a[(2, 3)], (0, 2): a[(3, 3)]}
    )
    q1 = power_to_trig(
        beta,
        {
            (3, 0): b[(2, 2)],
            (2, 1): b[(2, 3)] + cq[(2, 2)],
            (1, 2): b[(3, 3)] + cq[(2, 3)],
            (0, 3): cq[(3, 3)],
        },
    )
    q2 = power_to_trig(
        beta,
        {
            (2, 0): b[(1, 2)],
            (1, 1): b[(1, 3)] + cq[(1, 2)],
            (0, 2): cq[(1, 3)],
        },
    )
    q3_cubic = power_to_trig(
        beta,
        {
            (4, 0): bc[(2, 2, 2)],
            (3, 1): bc[(2, 2, 3)] + cc[(2, 2, 2)],
            (2, 2): bc[(2, 3, 3)] + cc[(2, 2, 3)],
            (1, 3): bc[(3, 3, 3)] + cc[(2, 3, 3)],
            (0, 4): cc[(3, 3, 3)],
        },
    )
    l1 = rotation_rate_poly(td)
    q3 = q3_cubic - q1.product(l1) * (1.0 / beta)
    return {"P1": p1, "Q1": q1, "Q2": q2, "Q3": q3}


def rotation_rate_poly(td: TaylorData) -> TrigPoly:
    """L1(theta): quadratic in-plane correction to the angular rate.

    theta_dot = beta + rho * L1(theta) + O(rho^2) along the slow manifold.
    """
    b = td.quad["b"]
    cq = td.quad["c"]
    return power_to_trig(
        td.beta,
        {
            (3, 0): cq[(2, 2)],
            (2, 1): cq[(2, 3)] - b[(2, 2)],
            (1, 2): cq[(3, 3)] - b[(2, 3)],
            (0, 3): -b[(3, 3)],
        },
    )


def p1_poly(td: TaylorData) -> TrigPoly:
    """Oscillating slow-manifold response (tilde P1 - tilde P1') / (1+4 beta^2)."""
    p1 = build_trig_polys(td)["P1"]
    tilde = p1.tilde()
    return (tilde - tilde.deriv_phi()) * (1.0 / (1.0 + 4.0 * td.beta**2))


def xi0_poly(td: TaylorData) -> TrigPoly:
    """Leading slow-manifold graph coefficient: xi0 = mean(P1) + p1."""
    p1 = build_trig_polys(td)["P1"]
    return p1_poly(td) + p1.mean()


def u_poly(td: TaylorData) -> TrigPoly:
    """U(theta) with x1 = U(theta) rho^2 on the slow manifold.

    Identical harmonic content to xi0; named separately because consumers
    index it by the rotation angle theta.
    """
    return xi0_poly(td)


def slow_manifold_constants(td: TaylorData):
    """Constants (a, A, vartheta) of U(theta) = a + A cos(2 theta - vartheta).

    ``vartheta`` is None when A = 0 (the circularly symmetric case leaves
    the phase undefined).  The two-argument arctangent fixes the quadrant;
    the harmonic-2 amplitudes come from the same periodic solution of
    beta U' + U = P1 that xi0 implements, which is the convention the
    radial drift (and hence gamma) actually requires.
    """
    u = u_poly(td)
    a = u.mean()
    c2 = u.c[2] if u.harmonics >= 2 else 0.0
    s2 = u.s[2] if u.harmonics >= 2 else 0.0
    amp = math.hypot(c2, s2)
    if amp == 0.0:
        return a, 0.0, None
    return a, amp, math.atan2(s2, c2)


def lyapunov1(td: TaylorData, method: str = "fourier", n_quad: int = 1024) -> float:
    """First Lyapunov coefficient: mean of U*Q2bar + Q3bar over the angle.

    method="fourier" integrates exactly via matching harmonics;
    method="quadrature" uses an n_quad-point trapezoidal rule on the same
    integrand (the two agree to roundoff and serve as mutual checks).
    """
    polys = build_trig_polys(td)
    u = u_poly(td)
    q2, q3 = polys["Q2"], polys["Q3"]
    if method == "fourier":
        return u.mean_product(q2) + q3.mean()
    if method == "quadrature":
        th = np.linspace(0.0, 2.0 * np.pi, n_quad, endpoint=False)
        vals = u.eval_theta(th) * q2.eval_theta(th) + q3.eval_theta(th)
        return float(np.mean(vals))
    raise ValueError(f"unknown method {method!r}")


@dataclass
class HopfAsymptotics:
    """Bundle of the scalar asymptotic constants at one parameter point."""

    beta: float
    gamma: float
    a_const: float
    A_const: float
    theta_offset: float | None
    c_fit: float | None = None

    @property
    def omega(self) -> float:
        return 2.0 * math.pi / self.beta

    def to_json(self) -> str:
        return json.dumps(
            {
                "beta": self.beta,
                "gamma": self.gamma,
                "a": self.a_const,
                "A": self.A_const,
                "vartheta": self.theta_offset,
                "c_fit": self.c_fit,
                "omega": self.omega,
            },
            sort_keys=True,
        )


def hopf_asymptotics(td: TaylorData, c_fit: float | None = None) -> HopfAsymptotics:
    a, amp, vth = slow_manifold_constants(td)
    return HopfAsymptotics(
        beta=td.beta,
        gamma=lyapunov1(td),
        a_const=a,
        A_const=amp,
        theta_offset=vth,
        c_fit=c_fit,
    )


def orbit_approx(alpha: float, ha: HopfAsymptotics):
    """Leading-order periodic orbit born at the bifurcation.

    Returns ``(curve, rho_bar)`` where ``curve(theta)`` maps angles to
    points ``(rho_bar^2 (a + A cos 2 theta), rho_bar cos theta,
    rho_bar sin theta)``; exists only when alpha and gamma have opposite
    signs.
    """
    if alpha * ha.gamma >= 0:
        raise DomainError(
            f"no periodic orbit at leading order: alpha*gamma = {alpha * ha.gamma} >= 0"
        )
    rho_bar = math.sqrt(alpha / -ha.gamma)
    a, amp = ha.a_const, ha.A_const

    def curve(theta):
        theta = np.asarray(theta, dtype=float)
        x1 = rho_bar**2 * (a + amp * np.cos(2.0 * theta))
        return np.stack(
            [x1, rho_bar * np.cos(theta), rho_bar * np.sin(theta)], axis=0
        )

    return curve, rho_bar


def curvature_torsion(theta, A: float, alpha: float, gamma: float):
    """Leading-order curvature and torsion of the bifurcating orbit.

    Valid in the rescaled frame where the orbit's circular factor has unit
    radius (physical orbit with rho_bar = sqrt(alpha/-gamma) = 1); the
    torsion carries the (-gamma/alpha) amplitude factor.
    """
    theta = np.asarray(theta, dtype=float)
    den = 1.0 + 2.0 * A**2 * (3.0 * np.cos(4.0 * theta) + 5.0)
    k = np.sqrt(den)
    kappa = (-gamma / alpha) * 6.0 * A * np.sin(2.0 * theta) / den
    if theta.ndim == 0:
        return float(k), float(kappa)
    return k, kappa


def transit_time(I0: float, I_bar: float, mu: float, gamma: float, epsilon: float) -> float:
    """Time to drift from action level I0 down to I_bar near the focus.

    Evaluates (1/(2 mu eps^2)) * ln((I0 + gamma/mu)/(I_bar + gamma/mu));
    the O(eps^2) correction inside the logarithm is omitted.
    """
    if I0 <= 0 or I_bar <= 0:
        raise DomainError("action levels must be positive")
    if 2.0 * I_bar > I0:
        raise DomainError("levels must be separated: need 2*I_bar <= I0")
    num = I0 + gamma / mu
    den = I_bar + gamma / mu
    if num <= 0 or den <= 0:
        raise DomainError("logarithm argument not positive")
    return math.log(num / den) / (2.0 * mu * epsilon**2)


def corrected_action(states, td: TaylorData, epsilon: float):
    """Rescaled action I = (eps/rho + eps*q1(theta))^2 along states (3, n).

    The zero-mean antiderivative q1 of Q1 removes the O(eps)-amplitude
    oscillation of the raw 1/rho^2, leaving the slow drift the transit-time
    formula describes.
    """
    states = np.asarray(states, dtype=float)
    q1 = build_trig_polys(td)["Q1"].antideriv_phi()
    rho = np.hypot(states[1], states[2])
    theta = np.arctan2(states[2], states[1])
    return (epsilon / rho + epsilon * q1.eval_theta(theta)) ** 2


def measure_transit_time(
    alpha: float,
    p: float,
    I0: float = 3.0,
    I_bar: float = 1.0,
    start_factor: float = 0.55,
    cfg=None,
) -> dict:
    """Measured vs predicted drift time between action levels I0 > I_bar.

    Integrates the combustion model from a point on the slow manifold with
    action above I0 and takes the first crossings of the corrected action
    through I0 and I_bar.  The prediction uses the drift coefficient gamma
    evaluated from Taylor data at the run's alpha.
    """
    from .integrate import IntegratorConfig, integrate
    from .model import normal_form
    from .taylor import taylor_of_model

    cfg = cfg or IntegratorConfig()
    epsilon = math.sqrt(alpha)
    td = taylor_of_model(alpha, p)
    gamma = lyapunov1(td)
    u = u_poly(td)
    rho0 = start_factor * epsilon / math.sqrt(I0)
    x0 = [u.eval_theta(0.0) * rho0**2, rho0, 0.0]
    nf = normal_form(alpha, p)
    t_end = 0.6 * transit_time(I0 / start_factor**2, I_bar, 1.0, gamma, epsilon) * 2.5 + 80.0
    traj = integrate(nf, x0, (0.0, t_end), cfg=cfg)
    ts, ys = traj.sample(max(4000, int(t_end * 200)))
    act = corrected_action(ys, td, epsilon)

    def first_cross_down(level):
        below = act <= level
        idx = np.flatnonzero(~below[:-1] & below[1:])
        if len(idx) == 0:
            raise DomainError(f"action never crossed level {level}")
        i = int(idx[0])
        # linear interpolation in log(action)
        y0, y1 = math.log(act[i]), math.log(act[i + 1])
        return ts[i] + (math.log(level) - y0) * (ts[i + 1] - ts[i]) / (y1 - y0)

    t_hi = first_cross_down(I0)
    t_lo = first_cross_down(I_bar)
    measured = t_lo - t_hi
    predicted = transit_time(I0, I_bar, 1.0, gamma, epsilon)
    return {
        "measured": measured,
        "predicted": predicted,
        "rel_error": (measured - predicted) / predicted,
        "gamma": gamma,
    }


@dataclass
class IsiBounds:
    """Closed-form lower/upper interspike-interval bounds."""

    tau_minus: float
    tau_plus: float
    C_minus: float
    C_plus: float
    chi: float
    epsilon: float
    alpha: float
    gamma: float


def isi_bounds(alpha, gamma, epsilon, C_minus, C_plus, chi=0.0) -> IsiBounds:
    """tau_minus/plus = ln(1 + alpha*C/( gamma eps^{4(+chi)} )) / (2 alpha)."""
    for name, val in (("alpha", alpha), ("gamma", gamma), ("epsilon", epsilon),
                      ("C_minus", C_minus), ("C_plus", C_plus)):
        if val <= 0:
            raise DomainError(f"{name} must be positive, got {val}")
    if chi < 0:
        raise DomainError(f"chi must be nonnegative, got {chi}")
    tau_minus = math.log1p(alpha * C_minus / (gamma * epsilon**4)) / (2 * alpha)
    tau_plus = math.log1p(alpha * C_plus / (gamma * epsilon ** (4 + chi))) / (2 * alpha)
    return IsiBounds(
        tau_minus=tau_minus,
        tau_plus=tau_plus,
        C_minus=C_minus,
        C_plus=C_plus,
        chi=chi,
        epsilon=epsilon,
        alpha=alpha,
        gamma=gamma,
    )


def isi_fixed_gamma(alpha, C_tilde) -> float:
    """Reduced bound form for fixed gamma: ln(1 + C~ alpha) / (2 alpha)."""
    if alpha <= 0 or C_tilde <= 0:
        raise DomainError("alpha and C_tilde must be positive")
    return math.log1p(C_tilde * alpha) / (2 * alpha)


def isi_fixed_alpha_slope(alpha) -> float:
    """Slope of tau versus ln(gamma) at fixed alpha: -1/(2 alpha)."""
    if alpha <= 0:
        raise DomainError("alpha must be positive")
    return -1.0 / (2.0 * alpha)


def analytic_map_G(I, mu, gamma, c, epsilon, omega):
    """One-cycle amplitude map G(I) = I - 2 eps^2 omega (mu I + gamma + eps^2 c / I)."""
    I = np.asarray(I, dtype=float)
    if np.any(I <= 0):
        raise DomainError("G is defined for I > 0")
    out = I - 2.0 * epsilon**2 * omega * (mu * I + gamma + epsilon**2 * c / I)
    return float(out) if out.ndim == 0 else out


def map_G_deriv(I, mu, gamma, c, epsilon, omega):
    """dG/dI for the analytic amplitude map."""
    I = np.asarray(I, dtype=float)
    if np.any(I <= 0):
        raise DomainError("G' is defined for I > 0")
    out = (1.0 - 2.0 * epsilon**2 * omega * mu) + 2.0 * epsilon**4 * omega * c / I**2
    return float(out) if out.ndim == 0 else out


def fixed_point_G(mu, gamma, c, epsilon, omega=None) -> float:
    """Unique positive fixed point of G (for mu > 0, c < 0).

    G(I) = I reduces to mu I^2 + gamma I + eps^2 c = 0; the positive root is
    taken and polished by one Newton step on G(I) - I (a no-op up to
    roundoff, kept as a guard against cancellation for tiny eps).
    """
    if mu <= 0:
        raise DomainError("fixed point requires mu > 0")
    disc = gamma**2 - 4.0 * mu * epsilon**2 * c
    if disc < 0:
        raise DomainError("no real fixed point: discriminant negative")
    root = (-gamma + math.sqrt(disc)) / (2.0 * mu)
    if root <= 0:
        raise DomainError("no positive fixed point")
    # Newton polish on F(I) = mu I^2 + gamma I + eps^2 c
    for _ in range(3):
        f = mu * root**2 + gamma * root + epsilon**2 * c
        df = 2.0 * mu * root + gamma
        if df == 0:
            break
        root -= f / df
    return float(root)


@dataclass
class SecondLyapunovFit:
    """Result of fitting c in the amplitude-map template to numeric samples."""

    c: float
    residual_rms: float
    n_used: int
    n_total: int
    layer_reached: bool
    ill_conditioned: bool


def fit_second_lyapunov(
    map_samples,
    alpha: float,
    gamma: float,
    epsilon: float,
    omega: float,
    layer_scale: float = 2.0,
    spike_factor: float = 3.0,
) -> SecondLyapunovFit:
    """Least-squares c from numeric first-return samples.

    The numeric map in the unscaled action J = 1/rho^2 reads
    J' = (1 - 2 omega alpha) J - 2 omega gamma - 2 omega c / J;
    c is linear in the residual against the affine part.  Samples that are
    obvious global reinjections (J' more than ``spike_factor`` times the
    affine prediction plus its own scale) are excluded: the template models
    the local boundary layer, not the spike return.  The fit is flagged
    ill-conditioned when no sample reaches the boundary layer
    J <= layer_scale / epsilon.

    ``map_samples`` is anything with ``I_k``/``I_next`` arrays (ReturnMapData)
    or a pair of arrays.
    """
    if hasattr(map_samples, "I_k"):
        jk = np.asarray(map_samples.I_k, dtype=float)
        jk1 = np.asarray(map_samples.I_next, dtype=float)
    else:
        jk, jk1 = (np.asarray(a, dtype=float) for a in map_samples)
    if len(jk) == 0:
        raise FitError("no samples to fit")
    affine = (1.0 - 2.0 * omega * alpha) * jk - 2.0 * omega * gamma
    keep = jk1 <= spike_factor * np.maximum(affine, 0.0) + spike_factor * np.abs(jk)
    keep &= np.isfinite(jk1) & np.isfinite(jk) & (jk > 0)
    if not np.any(keep):
        raise FitError("all samples rejected as reinjections")
    x = -2.0 * omega / jk[keep]
    y = jk1[keep] - affine[keep]
    denom = float(x @ x)
    if denom == 0:
        raise FitError("degenerate design (all 1/J equal zero?)")
    c = float(x @ y) / denom
    resid = y - c * x
    layer = bool(np.min(jk[keep]) <= layer_scale / epsilon)
    return SecondLyapunovFit(
        c=c,
        residual_rms=float(np.sqrt(np.mean(resid**2))),
        n_used=int(np.sum(keep)),
        n_total=len(jk),
        layer_reached=layer,
        ill_conditioned=not layer,
    )
