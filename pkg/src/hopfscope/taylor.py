"""Quadratic and cubic Taylor coefficients of a 3D vector field at the origin.

Coefficients follow the ordered-sum convention: the degree-2 part of
component ``sigma`` (``a`` for x1dot, ``b`` for x2dot, ``c`` for x3dot) is
``sum_{i<=j} sigma_ij x_i x_j`` and the degree-3 part is
``sum_{i<=j<=k} sigma_ijk x_i x_j x_k``, so every ordered monomial carries
exactly one coefficient.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, FitError

__all__ = ["TaylorData", "extract_taylor", "taylor_of_model", "taylor_poly"]

_COMPONENTS = ("a", "b", "c")

# ordered index tuples, 1-based
QUAD_INDICES = tuple(
    (i, j) for i in (1, 2, 3) for j in (1, 2, 3) if i <= j
)
CUBIC_INDICES = tuple(
    (i, j, k)
    for i in (1, 2, 3)
    for j in (1, 2, 3)
    for k in (1, 2, 3)
    if i <= j <= k
)


def _exponents(idx):
    e = [0, 0, 0]
    for i in idx:
        e[i - 1] += 1
    return tuple(e)


@dataclass
class TaylorData:
    """Ordered quadratic/cubic coefficients of the three field components."""

    alpha: float
    beta: float
    quad: dict = field(default_factory=dict)   # quad["a"][(2,3)] -> a_23
    cubic: dict = field(default_factory=dict)  # cubic["b"][(2,2,2)] -> b_222

    def coeff(self, name: str) -> float:
        """Look up a coefficient by name, e.g. ``"a23"`` or ``"b222"``."""
        sigma, idx = name[0], tuple(int(ch) for ch in name[1:])
        table = self.quad if len(idx) == 2 else self.cubic
        return table[sigma][idx]

    def to_json(self) -> str:
        obj = {"alpha": self.alpha, "beta": self.beta}
        for sigma in _COMPONENTS:
            obj[f"{sigma}_ij"] = {
                "".join(map(str, idx)): self.quad[sigma][idx] for idx in QUAD_INDICES
            }
            obj[f"{sigma}_ijk"] = {
                "".join(map(str, idx)): self.cubic[sigma][idx] for idx in CUBIC_INDICES
            }
        return json.dumps(obj, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "TaylorData":
        obj = json.loads(text)
        quad = {}
        cubic = {}
        for sigma in _COMPONENTS:
            quad[sigma] = {
                tuple(int(ch) for ch in key): float(val)
                for key, val in obj[f"{sigma}_ij"].items()
            }
            cubic[sigma] = {
                tuple(int(ch) for ch in key): float(val)
                for key, val in obj[f"{sigma}_ijk"].items()
            }
        return cls(alpha=float(obj["alpha"]), beta=float(obj["beta"]), quad=quad, cubic=cubic)

    @classmethod
    def zeros(cls, alpha: float = 0.0, beta: float = 1.0) -> "TaylorData":
        return cls(
            alpha=alpha,
            beta=beta,
            quad={s: {idx: 0.0 for idx in QUAD_INDICES} for s in _COMPONENTS},
            cubic={s: {idx: 0.0 for idx in CUBIC_INDICES} for s in _COMPONENTS},
        )


# five-point central stencils on offsets (-2, -1, 0, 1, 2) * h
_STENCILS = {
    0: (np.array([0.0, 0.0, 1.0, 0.0, 0.0]), 0, None),
    1: (np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0, 1, 4),
    2: (np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0, 2, 4),
    3: (np.array([-1.0, 2.0, 0.0, -2.0, 1.0]) / 2.0, 3, 2),
}
_OFFSETS = np.array([-2.0, -1.0, 0.0, 1.0, 2.0])


def _cube_values(fun, h):
    """Evaluate the field on the 5x5x5 offset cube around the origin."""
    vals = np.empty((5, 5, 5, 3))
    for i, j, k in itertools.product(range(5), repeat=3):
        x = np.array([_OFFSETS[i] * h, _OFFSETS[j] * h, _OFFSETS[k] * h])
        vals[i, j, k] = fun(x)
    return vals

def _derivative_from_cube(vals, h, exponents):
    """Mixed partial of multi-index ``exponents`` via tensor-product stencils."""
    w = []
    order_err = 4
    for m in exponents:
        stencil, power, err = _STENCILS[m]
        w.append(stencil / h**power)
        if err is not None:
            order_err = min(order_err, err)
    d = np.einsum("i,j,k,ijkc->c", w[0], w[1], w[2], vals)
    return d, order_err


def extract_taylor(fun, alpha: float, beta: float, h_fd: float = 1e-3) -> TaylorData:
    """Extract ordered quadratic/cubic coefficients by finite differences.

    Central five-point stencils (fourth order for first/second derivatives,
    second order for third derivatives) are combined tensor-product-wise for
    mixed partials and Richardson-extrapolated across steps ``h_fd`` and
    ``h_fd/2``.

    Parameters
    ----------
    fun : callable
        Field ``x -> ndarray(3,)``, smooth near the origin, with zero value
        and (up to the linear block) zero nonlinear Jacobian there.
    alpha, beta : float
        Metadata stored on the result (the linear-part parameters at which
        the field was built).
    h_fd : float
        Base finite-difference step.

    Raises
    ------
    FitError
        If the degree-3 truncation does not shrink like the fourth power of
        the radius on a shrinking test ball (exponent off by more than 0.5),
        which indicates the field is not smooth enough for the expansion.
    """
    cube_h = _cube_values(fun, h_fd)
    cube_h2 = _cube_values(fun, h_fd / 2.0)

    td = TaylorData.zeros(alpha=alpha, beta=beta)
    for idx in QUAD_INDICES + CUBIC_INDICES:
        expo = _exponents(idx)
        d1, order_err = _derivative_from_cube(cube_h, h_fd, expo)
        d2, _ = _derivative_from_cube(cube_h2, h_fd / 2.0, expo)
        fac = 2.0**order_err
        deriv = (fac * d2 - d1) / (fac - 1.0)
        coeff = deriv / math.prod(math.factorial(m) for m in expo)
        table = td.quad if len(idx) == 2 else td.cubic
        for comp_i, sigma in enumerate(_COMPONENTS):
            table[sigma][idx] = float(coeff[comp_i])

    _check_remainder(fun, td)
    return td


def _check_remainder(fun, td, radii=(8e-3, 4e-3), n_dirs=24):
    """Verify the residual against the degree-3 polynomial scales like r^4."""
    rng = np.random.default_rng(12345)
    dirs = rng.normal(size=(n_dirs, 3))
    dirs /= np.linalg.norm(dirs, axis=1)[:, None]
    lin = _linear_part(fun)
    maxres = []
    for r in radii:
        res = 0.0
        for d in dirs:
            x = r * d
            res = max(res, float(np.max(np.abs(fun(x) - lin @ x - taylor_poly(td, x)))))
        maxres.append(res)
    if maxres[-1] < 1e-14:  # exactly polynomial input: nothing to check
        return
    slope = math.log(maxres[0] / maxres[1]) / math.log(radii[0] / radii[1])
    if abs(slope - 4.0) > 0.5:
        raise FitError(
            f"degree-3 remainder scales like r^{slope:.2f}, expected r^4: "
            "field is not smooth enough (or has unremoved low-order terms)"
        )


def _linear_part(fun, h=1e-6):
    cols = []
    for j in range(3):
        e = np.zeros(3)
        e[j] = h
        fp = np.asarray(fun(e), dtype=float)
        fm = np.asarray(fun(-e), dtype=float)
        f2p = np.asarray(fun(2 * e), dtype=float)
        f2m = np.asarray(fun(-2 * e), dtype=float)
        cols.append((8 * (fp - fm) - (f2p - f2m)) / (12 * h))
    return np.column_stack(cols)


def taylor_of_model(alpha: float, p: float, h_fd: float = 1e-3) -> TaylorData:
    """Taylor data of the combustion field in normal coordinates at (alpha, p)."""
    from .model import normal_form

    nf = normal_form(alpha, p)
    return extract_taylor(nf.field, alpha=nf.alpha, beta=nf.beta, h_fd=h_fd)


def taylor_poly(td: TaylorData, x) -> np.ndarray:
    """Evaluate the quadratic + cubic part of the expansion at ``x``."""
    x = np.asarray(x, dtype=float)
    out = np.zeros(3)
    for comp_i, sigma in enumerate(_COMPONENTS):
        acc = 0.0
        for idx, c in td.quad[sigma].items():
            if c != 0.0:
                acc += c * x[idx[0] - 1] * x[idx[1] - 1]
        for idx, c in td.cubic[sigma].items():
            if c != 0.0:
                acc += c * x[idx[0] - 1] * x[idx[1] - 1] * x[idx[2] - 1]
        out[comp_i] = acc
    return out
