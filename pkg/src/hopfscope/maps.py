"""Cross-section machinery: flow maps, contraction diagnostics, return maps.

The numeric first-return map records the unscaled action J = 1/rho^2 at
successive directional crossings of a half-plane theta = theta_bar; away
from the reinjection region it is nearly affine with per-cycle contraction
exp(-2 alpha omega), and near small J it rises steeply (the spike-return
branch).  Orbit classification and parameter sweeps build bifurcation
diagrams from those crossing sequences.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, EventError, FitError
from .integrate import EventSpec, IntegratorConfig, integrate, iter_crossings
from .model import normal_form
from .taylor import taylor_of_model

__all__ = [
    "FlowMapSample",
    "flow_map_Q",
    "ContractionProfile",
    "contraction_profile",
    "symmetric_2x2_eigenvalues",
    "ReturnMapData",
    "first_return_map",
    "choose_theta_bar",
    "fit_linear_branch",
    "OrbitClass",
    "classify_orbit",
    "SweepStep",
    "SweepResult",
    "sweep_bifurcation",
    "gamma_of_p",
    "p_for_gamma",
]


# --------------------------------------------------------------------------
# flow map Sigma+ -> Sigma-


@dataclass(frozen=True)
class FlowMapSample:
    """Image of one mesh point of the inner cylinder on an x1 plane."""

    start: tuple  # (x1, theta) on the cylinder rho = rho_plus
    end: tuple | None  # (y1, y2) = (x2, x3) on the plane, None if missed
    flight_time: float | None
    plane: float
    failed: bool = False


def flow_map_Q(
    alpha: float,
    p: float,
    n_x1: int = 20,
    n_theta: int = 20,
    rho_plus: float = 0.1,
    x1_range=(-0.02, 0.02),
    planes=(-0.65,),
    cfg: IntegratorConfig | None = None,
    t_max: float = 400.0,
):
    """Integrate a mesh on the cylinder rho = rho_plus to x1-plane sections.

    Returns ``{plane: [FlowMapSample, ...]}`` with one sample per mesh point
    per plane (row-major over the x1 then theta grid).  Each trajectory is
    integrated once and stopped at its first crossing of the innermost
    plane; failures to reach a plane are recorded per sample, not raised.
    """
    cfg = cfg or IntegratorConfig(rtol=1e-9, atol=1e-11)
    nf = normal_form(alpha, p)
    x1s = np.linspace(x1_range[0], x1_range[1], n_x1)
    thetas = np.linspace(0.0, 2.0 * np.pi, n_theta, endpoint=False)
    planes = sorted(planes)  # innermost (largest x1) last
    specs = [EventSpec("plane", d, direction=+1) for d in planes]
    out = {d: [] for d in planes}
    until = specs[-1]  # plane closest to the origin is crossed last
    for x1v in x1s:
        for th in thetas:
            x0 = [x1v, rho_plus * math.cos(th), rho_plus * math.sin(th)]
            try:
                traj = integrate(nf, x0, (0.0, t_max), cfg=cfg, events=specs[:-1], until=until)
                events = traj.events
            except Exception:
                events = []
            for si, d in enumerate(planes):
                hit = next(
                    (ev for ev in events if ev.spec_index == si), None
                )
                if hit is None:
                    out[d].append(
                        FlowMapSample(
                            start=(float(x1v), float(th)),
                            end=None,
                            flight_time=None,
                            plane=d,
                            failed=True,
                        )
                    )
                else:
                    out[d].append(
                        FlowMapSample(
                            start=(float(x1v), float(th)),
                            end=(float(hit.state[1]), float(hit.state[2])),
                            flight_time=float(hit.t),
                            plane=d,
                        )
                    )
    return out


def image_diameter(samples) -> float:
    """Largest pairwise distance among successful images on one plane."""
    pts = np.array([s.end for s in samples if not s.failed])
    if len(pts) < 2:
        return 0.0
    d2 = np.sum((pts[:, None, :] - pts[None, :, :]) ** 2, axis=-1)
    return float(np.sqrt(d2.max()))


def image_min_norm(samples) -> float:
    pts = np.array([s.end for s in samples if not s.failed])
    if len(pts) == 0:
        raise EventError("no successful samples on the plane")
    return float(np.min(np.hypot(pts[:, 0], pts[:, 1])))


# --------------------------------------------------------------------------
# contraction profile along the x1 axis


def symmetric_2x2_eigenvalues(m):
    """Eigenvalues (ascending) of the symmetric part of a 2x2 matrix."""
    m = np.asarray(m, dtype=float)
    sym = 0.5 * (m + m.T)
    tr_half = 0.5 * (sym[0, 0] + sym[1, 1])
    rad = math.hypot(0.5 * (sym[0, 0] - sym[1, 1]), sym[0, 1])
    return tr_half - rad, tr_half + rad


@dataclass
class ContractionProfile:
    """Transverse-contraction diagnostics along the x1 axis."""

    x1: np.ndarray
    w: np.ndarray             # axial drift f1(x1, 0, 0)
    lambda_bar: np.ndarray    # -lambda_2 of the symmetric part
    lambda_under: np.ndarray  # -lambda_1
    x_star: float | None      # root of lambda_bar
    monotone_violations: np.ndarray  # x1 where d(lambda_bar)/dx1 >= 0
    positivity_ok: bool       # lambda_bar > 0 on the outer segment
    w_positive: bool
    ratio_bar: np.ndarray     # lambda_bar / w
    ratio_under: np.ndarray   # lambda_under / w
    h23_deviation: np.ndarray  # |(f2, f3)| on the axis (straightening gap)


def contraction_profile(
    alpha: float,
    p: float,
    grid=None,
    d1: float = -0.65,
    n: int = 120,
    h: float = 1e-6,
) -> ContractionProfile:
    """Evaluate the transverse contraction-rate profile on [d1, 0).

    The 2x2 matrix of partials of (f2, f3) with respect to (x2, x3) is
    formed by fourth-order central differences at points (x1, 0, 0); its
    symmetric-part eigenvalues give the negated rates lambda_bar (weak) and
    lambda_under (strong).  Monotonicity or positivity failures are
    recorded, never raised.
    """
    nf = normal_form(alpha, p)
    if grid is None:
        grid = np.linspace(d1, -1e-4, n)
    grid = np.asarray(grid, dtype=float)
    if np.any(grid >= 0):
        raise DomainError("grid must lie inside [d1, 0)")
    lam_bar = np.empty_like(grid)
    lam_under = np.empty_like(grid)
    w = np.empty_like(grid)
    h23 = np.empty_like(grid)
    for i, x1 in enumerate(grid):
        base = np.array([x1, 0.0, 0.0])
        cols = []
        for j in (1, 2):
            e = np.zeros(3)
            e[j] = h
            fp = nf.field(base + e)
            fm = nf.field(base - e)
            f2p = nf.field(base + 2 * e)
            f2m = nf.field(base - 2 * e)
            cols.append((8.0 * (fp - fm) - (f2p - f2m))[1:] / (12.0 * h))
        m = np.column_stack(cols)
        l1, l2 = symmetric_2x2_eigenvalues(m)
        lam_under[i] = -l1
        lam_bar[i] = -l2
        f0 = nf.field(base)
        w[i] = f0[0]
        h23[i] = math.hypot(f0[1], f0[2])
    dl = np.diff(lam_bar)
    viol = grid[:-1][dl >= 0]
    # root of lambda_bar by bisection between the last sign change
    x_star = None
    sign_changes = np.flatnonzero(np.sign(lam_bar[:-1]) * np.sign(lam_bar[1:]) < 0)
    if len(sign_changes):
        from scipy.optimize import brentq

        i = int(sign_changes[-1])

        def lam_bar_at(x1):
            base = np.array([x1, 0.0, 0.0])
            cols = []
            for j in (1, 2):
                e = np.zeros(3)
                e[j] = h
                cols.append(
                    (8.0 * (nf.field(base + e) - nf.field(base - e))
                     - (nf.field(base + 2 * e) - nf.field(base - 2 * e)))[1:]
                    / (12.0 * h)
                )
            return -symmetric_2x2_eigenvalues(np.column_stack(cols))[1]

        x_star = float(brentq(lam_bar_at, grid[i], grid[i + 1], xtol=1e-12))
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio_bar = lam_bar / w
        ratio_under = lam_under / w
    outer = grid <= (x_star if x_star is not None else grid[-1])
    return ContractionProfile(
        x1=grid,
        w=w,
        lambda_bar=lam_bar,
        lambda_under=lam_under,
        x_star=x_star,
        monotone_violations=viol,
        positivity_ok=bool(np.all(lam_bar[outer] > 0)) if outer.any() else False,
        w_positive=bool(np.all(w > 0)),
        ratio_bar=ratio_bar,
        ratio_under=ratio_under,
        h23_deviation=h23,
    )


# --------------------------------------------------------------------------
# numeric first-return map


@dataclass
class ReturnMapData:
    """Consecutive-crossing samples of the action J = 1/rho^2."""

    I_k: np.ndarray
    I_next: np.ndarray
    t_k: np.ndarray
    x1_k: np.ndarray
    theta_bar: float
    alpha: float
    p: float
    seed_index: np.ndarray = field(default=None)

    def __len__(self):
        return len(self.I_k)

    def to_csv(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("I_k,I_k1,t_k\n")
            for a, b, t in zip(self.I_k, self.I_next, self.t_k):
                fh.write(f"{a!r},{b!r},{t!r}\n")

    def on_manifold(self, u_scale: float = 5.0) -> np.ndarray:
        """Mask of samples whose x1 has relaxed to the slow-manifold scale."""
        return np.abs(self.x1_k) < u_scale / np.maximum(self.I_k, 1e-300)

    def multivalued_branches(self, n_bins: int = 12, gap_factor: float = 4.0):
        """Detect coexisting image branches at equal abscissa.

        Bins log(I_k) over the drift region and flags bins whose images
        split into two clusters separated by more than ``gap_factor`` times
        the within-cluster spread.  Returns the list of flagged bin centers
        (empty when the sampled graph is single-valued).
        """
        good = np.isfinite(self.I_next) & (self.I_next > 0)
        if good.sum() < 8:
            return []
        x = np.log(self.I_k[good])
        y = np.log(self.I_next[good])
        edges = np.linspace(x.min(), x.max(), n_bins + 1)
        flagged = []
        for i in range(n_bins):
            m = (x >= edges[i]) & (x < edges[i + 1])
            if m.sum() < 6:
                continue
            vals = np.sort(y[m])
            gaps = np.diff(vals)
            j = int(np.argmax(gaps))
            lower, upper = vals[: j + 1], vals[j + 1 :]
            if len(lower) < 2 or len(upper) < 2:
                continue
            spread = max(np.std(lower), np.std(upper), 1e-6)
            if gaps[j] > gap_factor * spread:
                flagged.append(float(0.5 * (edges[i] + edges[i + 1])))
        return flagged


def _angle_spec(theta_bar):
    return EventSpec("angle", theta_bar, direction=+1, label="section")


def choose_theta_bar(
    alpha: float,
    p: float,
    x0=(0.0, 0.05, 0.0),
    t_probe: float = 200.0,
    candidates: int = 16,
    cfg: IntegratorConfig | None = None,
) -> float:
    """Pick a section angle whose crossings are one rotation apart.

    Integrates one probe trajectory and, for each candidate angle, checks
    that every unwrapped level ``theta_bar + 2 pi k`` is crossed exactly
    once; among clean candidates the one maximizing the minimum time gap
    between crossings wins.
    """
    cfg = cfg or IntegratorConfig(rtol=1e-8, atol=1e-10)
    nf = normal_form(alpha, p)
    traj = integrate(nf, x0, (0.0, t_probe), cfg=cfg)
    ts, ys = traj.sample(int(t_probe * 40))
    theta = np.unwrap(np.arctan2(ys[2], ys[1]))
    best = None
    for cand in np.linspace(0.0, 2.0 * np.pi, candidates, endpoint=False):
        k_lo = math.ceil((theta.min() - cand) / (2 * math.pi))
        k_hi = math.floor((theta.max() - cand) / (2 * math.pi))
        clean = True
        gaps = []
        prev_t = None
        for k in range(k_lo, k_hi + 1):
            level = cand + 2 * math.pi * k
            above = theta >= level
            ups = np.flatnonzero(~above[:-1] & above[1:])
            if len(ups) != 1:
                clean = False
                break
            t_cross = ts[ups[0]]
            if prev_t is not None:
                gaps.append(t_cross - prev_t)
            prev_t = t_cross
        if not clean or not gaps:
            continue
        score = min(gaps)
        if best is None or score > best[0]:
            best = (score, float(cand))
    if best is None:
        raise EventError("no clean section angle found on the probe trajectory")
    return best[1]


def first_return_map(
    alpha: float,
    p: float,
    theta_bar: float | None = None,
    n_transient: int = 0,
    n_samples: int = 400,
    seeds=((0.0, 0.01, 0.0),),
    cfg: IntegratorConfig | None = None,
    t_max: float = 4000.0,
) -> ReturnMapData:
    """Sample the numeric first-return map of J = 1/rho^2.

    Integrates each seed, discards the first ``n_transient`` crossings of
    the section, and records consecutive pairs until ``n_samples`` per seed
    or ``t_max`` is exhausted.  Seeds are merged in order into one cloud.
    """
    cfg = cfg or IntegratorConfig()
    if theta_bar is None:
        theta_bar = choose_theta_bar(alpha, p)
    nf = normal_form(alpha, p)
    spec = _angle_spec(theta_bar)
    all_I, all_I1, all_t, all_x1, all_seed = [], [], [], [], []
    for s_idx, seed in enumerate(seeds):
        crossings = []
        for ev in iter_crossings(nf, seed, t_max, [spec], cfg=cfg):
            crossings.append(ev)
            if len(crossings) >= n_transient + n_samples + 1:
                break
        if len(crossings) < n_transient + 2:
            raise EventError(
                f"seed {seed}: only {len(crossings)} section crossings in t <= {t_max}"
            )
        crossings = crossings[n_transient:]
        I_vals = np.array(
            [1.0 / (ev.state[1] ** 2 + ev.state[2] ** 2) for ev in crossings]
        )
        ts = np.array([ev.t for ev in crossings])
        x1s = np.array([ev.state[0] for ev in crossings])
        all_I.append(I_vals[:-1])
        all_I1.append(I_vals[1:])
        all_t.append(ts[:-1])
        all_x1.append(x1s[:-1])
        all_seed.append(np.full(len(I_vals) - 1, s_idx))
    return ReturnMapData(
        I_k=np.concatenate(all_I),
        I_next=np.concatenate(all_I1),
        t_k=np.concatenate(all_t),
        x1_k=np.concatenate(all_x1),
        theta_bar=float(theta_bar),
        alpha=alpha,
        p=p,
        seed_index=np.concatenate(all_seed),
    )


def fit_linear_branch(
    rm: ReturnMapData,
    I_range=(20.0, 3000.0),
    require_drift: bool = True,
    u_scale: float = 5.0,
):
    """Affine fit of the outer (drift) branch, slope and intercept.

    Restricts to on-manifold samples inside ``I_range``; when
    ``require_drift`` is set, only contracting pairs (I_next < I_k) enter,
    which excludes spike reinjections.
    """
    m = rm.on_manifold(u_scale)
    m &= (rm.I_k > I_range[0]) & (rm.I_k < I_range[1])
    if require_drift:
        m &= rm.I_next < rm.I_k
    if m.sum() < 8:
        raise FitError(f"only {int(m.sum())} samples in the linear-branch window")
    A = np.vstack([rm.I_k[m], np.ones(int(m.sum()))]).T
    (slope, intercept), res, *_ = np.linalg.lstsq(A, rm.I_next[m], rcond=None)
    return float(slope), float(intercept), int(m.sum())


# --------------------------------------------------------------------------
# orbit classification


@dataclass
class OrbitClass:
    classification: str  # "fixed" | "period-n" | "chaotic" | "escaped" | "aperiodic"
    period: int | None
    map_lyapunov: float | None
    ci: tuple | None  # bootstrap CI of the exponent

    def to_json_dict(self):
        return {
            "classification": self.classification,
            "period": self.period,
            "map_lyapunov": self.map_lyapunov,
            "ci_low": None if self.ci is None else self.ci[0],
            "ci_high": None if self.ci is None else self.ci[1],
        }


def _detect_period(tail, rel_tol):
    """Smallest n <= 64 with n-fold closure over the tail, else None."""
    for n_per in range(1, 65):
        if len(tail) < 3 * n_per:
            break
        a = tail[-n_per:]
        b = tail[-2 * n_per : -n_per]
        c = tail[-3 * n_per : -2 * n_per]
        scale = np.maximum(np.abs(a), 1e-300)
        if (np.max(np.abs(a - b) / scale) <= rel_tol
                and np.max(np.abs(a - c) / scale) <= rel_tol):
            return n_per
    return None


def _bootstrap_ci(vals, n_boot=400, seed=0):
    rng = np.random.default_rng(seed)
    means = np.array(
        [np.mean(rng.choice(vals, size=len(vals), replace=True)) for _ in range(n_boot)]
    )
    return float(np.quantile(means, 0.025)), float(np.quantile(means, 0.975))


def classify_orbit(
    map_or_sequence,
    I0: float | None = None,
    n_iter: int = 2000,
    n_transient: int = 200,
    deriv=None,
    rel_tol: float = 1e-6,
    escape_range=(0.0, np.inf),
) -> OrbitClass:
    """Classify an orbit of a 1D map as fixed / period-n / chaotic / escaped.

    ``map_or_sequence`` is either a callable map (iterated from ``I0``) or
    an observed orbit sequence (array).  The map Lyapunov exponent is the
    orbit average of ln|slope|: from ``deriv`` (or a central difference) for
    callables, and from local secants of the observed cloud for sequences.
    Chaos is claimed only when the exponent's bootstrap confidence interval
    lies above zero and no period closes.
    """
    if callable(map_or_sequence):
        g = map_or_sequence
        if I0 is None:
            raise DomainError("I0 required when classifying a callable map")
        x = float(I0)
        orbit = []
        for i in range(n_iter):
            x = g(x)
            if not np.isfinite(x) or not (escape_range[0] < x < escape_range[1]):
                return OrbitClass("escaped", None, None, None)
            orbit.append(x)
        orbit = np.array(orbit[n_transient:])
        if deriv is None:
            h = 1e-7

            def deriv(z):
                return (g(z * (1 + h)) - g(z * (1 - h))) / (2 * h * z)

        slopes = np.array([deriv(z) for z in orbit])
    else:
        orbit = np.asarray(map_or_sequence, dtype=float)
        if n_transient and len(orbit) > n_transient + 16:
            orbit = orbit[n_transient:]
        slopes = _secant_slopes(orbit)
    period = _detect_period(orbit, rel_tol)
    finite = np.abs(slopes) > 0
    lyap = float(np.mean(np.log(np.abs(slopes[finite])))) if finite.any() else None
    ci = _bootstrap_ci(np.log(np.abs(slopes[finite]))) if finite.sum() > 8 else None
    if period == 1:
        return OrbitClass("fixed", 1, lyap, ci)
    if period is not None:
        return OrbitClass(f"period-{period}", period, lyap, ci)
    if lyap is not None and ci is not None and ci[0] > 0:
        return OrbitClass("chaotic", None, lyap, ci)
    return OrbitClass("aperiodic", None, lyap, ci)


def _secant_slopes(orbit):
    """Local secant slopes of the empirical graph (x_k, x_{k+1})."""
    xk = orbit[:-1]
    xk1 = orbit[1:]
    order = np.argsort(xk)
    xs, ys = xk[order], xk1[order]
    slopes = []
    for i in range(len(xs)):
        j = i + 1 if i + 1 < len(xs) else i - 1
        # nearest distinct abscissa
        step = 1
        while abs(xs[j] - xs[i]) < 1e-12 * max(1.0, abs(xs[i])):
            step += 1
            lo, hi = i - step, i + step
            if hi < len(xs):
                j = hi
            elif lo >= 0:
                j = lo
            else:
                break
        dx = xs[j] - xs[i]
        if dx != 0:
            slopes.append((ys[j] - ys[i]) / dx)
    return np.array(slopes) if slopes else np.array([np.nan])


# --------------------------------------------------------------------------
# parameter sweeps


@dataclass
class SweepStep:
    param: float
    gamma: float | None
    orbit: OrbitClass
    attractor: np.ndarray  # post-transient J samples
    failed: bool = False
    message: str = ""


@dataclass
class SweepResult:
    param_name: str
    steps: list
    doubling_events: list  # (param_before, param_after, n, 2n)

    def diagram_to_csv(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("param,attractor_value\n")
            for st in self.steps:
                for v in st.attractor:
                    fh.write(f"{st.param!r},{v!r}\n")


def _doublings(steps):
    out = []
    prev = None
    for st in steps:
        per = st.orbit.period
        if prev is not None and prev[1] is not None and per is not None:
            if per == 2 * prev[1]:
                out.append((prev[0], st.param, prev[1], per))
        prev = (st.param, per)
    return out


def _sweep_one(args):
    (value, alpha, p, theta_bar, n_transient, n_keep, cfg, t_max, rel_tol) = args
    try:
        rm = first_return_map(
            alpha,
            p,
            theta_bar=theta_bar,
            n_transient=0,
            n_samples=n_transient + n_keep,
            seeds=((0.0, 0.3, 0.0),),
            cfg=cfg,
            t_max=t_max,
        )
        seq = np.concatenate([rm.I_k, rm.I_next[-1:]])
        orbit = classify_orbit(seq, n_transient=n_transient, rel_tol=rel_tol)
        tail = seq[n_transient:]
        return SweepStep(param=value, gamma=None, orbit=orbit, attractor=tail[-n_keep:])
    except Exception as exc:  # per-point failures recorded, not fatal
        return SweepStep(
            param=value,
            gamma=None,
            orbit=OrbitClass("escaped", None, None, None),
            attractor=np.array([]),
            failed=True,
            message=str(exc),
        )


def sweep_bifurcation(
    param: str,
    values,
    alpha: float | None = None,
    p: float | None = None,
    theta_bar: float = 0.0,
    n_transient: int = 120,
    n_keep: int = 80,
    cfg: IntegratorConfig | None = None,
    t_max: float = 2500.0,
    rel_tol: float = 1e-5,
    jobs: int = 1,
) -> SweepResult:
    """Sweep alpha, p, or a gamma target and classify the attractor per step.

    param one of "alpha", "p", "gamma-proxy".  Gamma targets are converted
    to p by locally inverting the first-Lyapunov-coefficient curve.  Steps
    are independent (fresh seed each), so results do not depend on ``jobs``;
    outputs are merged in input order.
    """
    values = list(values)
    if not values:
        return SweepResult(param_name=param, steps=[], doubling_events=[])
    cfg = cfg or IntegratorConfig(rtol=1e-9, atol=1e-11)
    tasks = []
    gammas = []
    for v in values:
        if param == "alpha":
            a_, p_ = float(v), float(p)
        elif param == "p":
            a_, p_ = float(alpha), float(v)
        elif param == "gamma-proxy":
            a_, p_ = float(alpha), p_for_gamma(float(v))
        else:
            raise DomainError(f"unknown sweep parameter {param!r}")
        gammas.append(gamma_of_p(p_))
        tasks.append(
            (float(v), a_, p_, theta_bar, n_transient, n_keep, cfg, t_max, rel_tol)
        )
    if jobs > 1:
        import concurrent.futures as cf

        with cf.ProcessPoolExecutor(max_workers=jobs) as ex:
            steps = list(ex.map(_sweep_one, tasks))
    else:
        steps = [_sweep_one(t) for t in tasks]
    for st, g in zip(steps, gammas):
        st.gamma = g
    return SweepResult(
        param_name=param, steps=steps, doubling_events=_doublings(steps)
    )


# --------------------------------------------------------------------------
# gamma(p) helper


def gamma_of_p(p: float) -> float:
    """First Lyapunov coefficient of the combustion model at the Hopf point."""
    from .asymptotics import lyapunov1

    return lyapunov1(taylor_of_model(0.0, float(p)))


def p_for_gamma(gamma_target: float, bracket=(2.76, 3.8)) -> float:
    """Invert gamma(p) locally by bracketing + secant refinement."""
    from scipy.optimize import brentq

    lo, hi = bracket
    f = lambda p: gamma_of_p(p) - gamma_target
    flo, fhi = f(lo), f(hi)
    if flo * fhi > 0:
        # widen toward the supercritical side
        lo2 = 2.0
        if f(lo2) * fhi > 0:
            raise DomainError(
                f"gamma = {gamma_target} not bracketed by p in [{lo2}, {hi}]"
            )
        lo = lo2
    return float(brentq(f, lo, hi, xtol=1e-10))
