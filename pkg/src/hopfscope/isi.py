"""Multimodal-oscillation detection and interspike-interval statistics.

A trajectory is multimodal when large-amplitude spikes (norm exceeding r2)
strictly alternate with near-origin passages (norm dipping below r1*eps^2).
Detection runs a hysteresis state machine over the norm-threshold crossing
log: a spike arms the entry detector and vice versa, which consolidates
repeated near-origin visits between two spikes into a single entry event.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, FitError, NotMultimodalError
from .integrate import EventSpec, IntegratorConfig, integrate, iter_crossings, locate_events
from .model import normal_form

__all__ = [
    "SpikeTrain",
    "IsiSeries",
    "detect_multimodal",
    "measure_spike_train",
    "isi_series",
    "check_bounds",
    "fit_isi_scaling",
    "fit_bound_constants",
    "FitReport",
]

DEFAULT_R2 = 0.3
DEFAULT_R1 = 2.0  # near-origin gate |x| <= r1 * eps^2; reinjection reaches ~1.3 eps^2


@dataclass
class SpikeTrain:
    """Alternating spike / near-origin entry times of one trajectory."""

    spike_times: np.ndarray
    entry_times: np.ndarray
    r1: float
    r2: float
    epsilon: float
    raw_crossings: list = field(default_factory=list)  # audit log (t, kind)

    @property
    def is_multimodal(self) -> bool:
        return len(self.spike_times) >= 2 and len(self.entry_times) >= 1

    def events_interleaved(self):
        """(time, kind) pairs in time order; kinds are 'spike'/'entry'."""
        evs = [(t, "spike") for t in self.spike_times]
        evs += [(t, "entry") for t in self.entry_times]
        return sorted(evs)


def build_spike_train(crossings, r1, r2, epsilon) -> SpikeTrain:
    """Run the alternation state machine over norm-threshold crossings.

    ``crossings`` is an iterable of (time, kind) with kind "spike_up" for
    upward crossings of r2 and "entry_down" for downward crossings of
    r1*eps^2, in time order.  Strict alternation is enforced by
    construction; a spike is recorded only when armed (after start or after
    an entry), an entry only after a spike.
    """
    spikes, entries = [], []
    armed_spike = True
    raw = []
    for t, kind in crossings:
        raw.append((float(t), kind))
        if kind == "spike_up":
            if armed_spike:
                spikes.append(float(t))
                armed_spike = False
        elif kind == "entry_down":
            if not armed_spike and len(spikes) > len(entries):
                entries.append(float(t))
                armed_spike = True
        else:
            raise DomainError(f"unknown crossing kind {kind!r}")
    return SpikeTrain(
        spike_times=np.array(spikes),
        entry_times=np.array(entries),
        r1=r1,
        r2=r2,
        epsilon=epsilon,
        raw_crossings=raw,
    )


def _norm_specs(r1, r2, epsilon):
    gate = r1 * epsilon**2
    if not (r2 > gate):
        raise DomainError(f"need r2 > r1*eps^2, got {r2} <= {gate}")
    return [
        EventSpec("norm", r2, direction=+1, label="spike_up"),
        EventSpec("norm", gate, direction=-1, label="entry_down"),
    ]


def detect_multimodal(traj, r1=DEFAULT_R1, r2=DEFAULT_R2, epsilon=None) -> SpikeTrain:
    """Extract the alternating spike/entry sequence from a trajectory.

    ``epsilon`` defaults to sqrt(alpha) read off nothing: it must be given,
    since the trajectory does not carry the control parameter.
    """
    if epsilon is None:
        raise DomainError("epsilon (= sqrt(alpha) for mu = 1) is required")
    specs = _norm_specs(r1, r2, epsilon)
    events = locate_events(traj, specs, scan_dt=min(traj.cfg.scan_dt, 0.2))
    crossings = [(ev.t, ev.kind) for ev in events]
    return build_spike_train(crossings, r1, r2, epsilon)


def measure_spike_train(
    alpha: float,
    p: float,
    t_end: float,
    x0=(0.0, 0.01, 0.0),
    r1=DEFAULT_R1,
    r2=DEFAULT_R2,
    cfg: IntegratorConfig | None = None,
) -> SpikeTrain:
    """Long-run spike train of the combustion model (streamed, bounded memory)."""
    cfg = cfg or IntegratorConfig()
    epsilon = math.sqrt(alpha)
    nf = normal_form(alpha, p)
    specs = _norm_specs(r1, r2, epsilon)
    crossings = [
        (ev.t, ev.kind) for ev in iter_crossings(nf, x0, t_end, specs, cfg=cfg)
    ]
    return build_spike_train(crossings, r1, r2, epsilon)


@dataclass
class IsiSeries:
    """Interspike intervals tau_i = t_spike[i+1] - t_spike[i]."""

    tau: np.ndarray
    spike_times: np.ndarray

    def mean(self, discard_first: bool = True) -> float:
        vals = self.tau[1:] if discard_first and len(self.tau) > 1 else self.tau
        return float(np.mean(vals))

    def cv(self, discard_first: bool = True) -> float:
        vals = self.tau[1:] if discard_first and len(self.tau) > 1 else self.tau
        return float(np.std(vals) / np.mean(vals))

    def to_csv(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("i,t_spike,tau\n")
            for i, (t, tau) in enumerate(zip(self.spike_times[:-1], self.tau), start=1):
                fh.write(f"{i},{t!r},{tau!r}\n")


def isi_series(st: SpikeTrain) -> IsiSeries:
    if len(st.spike_times) < 2:
        raise NotMultimodalError(
            f"need >= 2 spikes for interspike intervals, got {len(st.spike_times)}"
        )
    return IsiSeries(tau=np.diff(st.spike_times), spike_times=st.spike_times.copy())


def check_bounds(isi: IsiSeries, bounds) -> dict:
    """Fraction of intervals inside [tau_minus, tau_plus] (first discarded)."""
    vals = isi.tau[1:] if len(isi.tau) > 1 else isi.tau
    inside = (vals >= bounds.tau_minus) & (vals <= bounds.tau_plus)
    return {
        "n": int(len(vals)),
        "fraction_inside": float(np.mean(inside)),
        "tau_minus": bounds.tau_minus,
        "tau_plus": bounds.tau_plus,
        "tau_min": float(np.min(vals)),
        "tau_max": float(np.max(vals)),
    }


def fit_bound_constants(runs, chi: float = 0.0, margin: float = 1.0):
    """Empirical C- / C+ from measured mean intervals.

    ``runs`` is a list of (alpha, gamma, epsilon, tau_values); the constants
    are chosen so the closed-form bounds enclose every supplied interval,
    then widened by ``margin`` (multiplicative) on both sides.
    """
    c_minus = math.inf
    c_plus = 0.0
    for alpha, gamma, epsilon, taus in runs:
        taus = np.asarray(taus, dtype=float)
        taus = taus[1:] if len(taus) > 1 else taus
        lo, hi = float(np.min(taus)), float(np.max(taus))
        c_minus = min(c_minus, (math.expm1(2 * alpha * lo)) * gamma * epsilon**4 / alpha)
        c_plus = max(
            c_plus, (math.expm1(2 * alpha * hi)) * gamma * epsilon ** (4 + chi) / alpha
        )
    if not (0 < c_minus < math.inf and c_plus > 0):
        raise FitError("could not fit bound constants from the supplied runs")
    return c_minus / margin, c_plus * margin


@dataclass
class FitReport:
    mode: str
    slope: float | None
    intercept: float | None
    params: dict
    residuals: np.ndarray
    r2: float
    theoretical_slope: float | None = None
    insufficient_span: bool = False

    def to_json(self) -> str:
        obj = {
            "mode": self.mode,
            "slope": self.slope,
            "intercept": self.intercept,
            "params": self.params,
            "residuals": [float(r) for r in self.residuals],
            "r2": self.r2,
            "theoretical_slope": self.theoretical_slope,
            "insufficient_span": self.insufficient_span,
        }
        return json.dumps(obj, sort_keys=True)


def fit_isi_scaling(runs, mode: str, alpha: float | None = None) -> FitReport:
    """Fit mean-interval scaling laws against a control parameter.

    mode "vs-ln-gamma": affine regression of tau on ln(gamma); the
    theoretical slope is -1/(2 alpha) when ``alpha`` is supplied.
    mode "vs-alpha": nonlinear fit of tau = ln(1 + C alpha) / (2 alpha)
    for the single constant C.

    ``runs``: list of (parameter, mean_isi) pairs.
    """
    pts = np.asarray(runs, dtype=float)
    if len(pts) < 5:
        raise FitError(f"need at least 5 runs, got {len(pts)}")
    x, y = pts[:, 0], pts[:, 1]
    span = np.max(x) / np.min(x) if np.min(x) > 0 else math.inf
    insufficient = span < 10.0
    if insufficient:
        warnings.warn(
            f"swept parameter spans a factor {span:.2f} < 10; "
            "scaling fit may be poorly constrained",
            stacklevel=2,
        )
    if mode == "vs-ln-gamma":
        lx = np.log(x)
        A = np.vstack([lx, np.ones_like(lx)]).T
        (slope, intercept), *_ = np.linalg.lstsq(A, y, rcond=None)
        pred = slope * lx + intercept
        resid = y - pred
        r2 = 1.0 - float(np.sum(resid**2)) / float(np.sum((y - y.mean()) ** 2))
        return FitReport(
            mode=mode,
            slope=float(slope),
            intercept=float(intercept),
            params={},
            residuals=resid,
            r2=r2,
            theoretical_slope=None if alpha is None else -1.0 / (2.0 * alpha),
            insufficient_span=insufficient,
        )
    if mode == "vs-alpha":
        from scipy.optimize import curve_fit

        def template(a, C):
            return np.log1p(C * a) / (2.0 * a)

        # moment start value from the largest alpha
        c0 = max(1.0, (math.expm1(2 * x[-1] * y[-1])) / x[-1])
        popt, _ = curve_fit(template, x, y, p0=[c0], maxfev=20000)
        pred = template(x, popt[0])
        resid = y - pred
        r2 = 1.0 - float(np.sum(resid**2)) / float(np.sum((y - y.mean()) ** 2))
        return FitReport(
            mode=mode,
            slope=None,
            intercept=None,
            params={"C": float(popt[0])},
            residuals=resid,
            r2=r2,
            insufficient_span=insufficient,
        )
    raise DomainError(f"unknown mode {mode!r}")
