"""Real trigonometric polynomials in the rotation angle theta.

A ``TrigPoly`` stores cosine/sine coefficients per harmonic and remembers
the rotation rate ``beta``, so it can be evaluated either in the angle
``theta`` or in the slow phase ``phi = theta / beta``; its period in phi is
``omega = 2*pi/beta``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["TrigPoly", "power_to_trig"]


@dataclass(frozen=True)
class TrigPoly:
    """c[0] + sum_m (c[m] cos(m theta) + s[m] sin(m theta))."""

    beta: float
    c: np.ndarray  # cosine coefficients, index = harmonic, c[0] = mean
    s: np.ndarray  # sine coefficients, s[0] unused (kept 0)

    @classmethod
    def from_coeffs(cls, beta, cos_coeffs, sin_coeffs) -> "TrigPoly":
        c = np.asarray(cos_coeffs, dtype=float).copy()
        s = np.asarray(sin_coeffs, dtype=float).copy()
        n = max(len(c), len(s), 1)
        c = np.pad(c, (0, n - len(c)))
        s = np.pad(s, (0, n - len(s)))
        s[0] = 0.0
        return cls(beta=float(beta), c=c, s=s)

    @classmethod
    def constant(cls, beta, value) -> "TrigPoly":
        return cls.from_coeffs(beta, [value], [0.0])

    @property
    def omega(self) -> float:
        return 2.0 * np.pi / self.beta

    @property
    def harmonics(self) -> int:
        return len(self.c) - 1

    def eval_theta(self, theta):
        theta = np.asarray(theta, dtype=float)
        out = np.full_like(theta, self.c[0], dtype=float)
        for m in range(1, len(self.c)):
            if self.c[m] != 0.0:
                out = out + self.c[m] * np.cos(m * theta)
            if self.s[m] != 0.0:
                out = out + self.s[m] * np.sin(m * theta)
        return float(out) if out.ndim == 0 else out

    def eval_phi(self, phi):
        return self.eval_theta(np.asarray(phi, dtype=float) * self.beta)

    __call__ = eval_theta

    def mean(self) -> float:
        return float(self.c[0])

    def tilde(self) -> "TrigPoly":
        """Oscillating part (mean removed)."""
        c = self.c.copy()
        c[0] = 0.0
        return TrigPoly(self.beta, c, self.s.copy())

    def deriv_theta(self) -> "TrigPoly":
        n = len(self.c)
        c = np.zeros(n)
        s = np.zeros(n)
        for m in range(1, n):
            c[m] = m * self.s[m]
            s[m] = -m * self.c[m]
        return TrigPoly(self.beta, c, s)

    def deriv_phi(self) -> "TrigPoly":
        d = self.deriv_theta()
        return TrigPoly(self.beta, self.beta * d.c, self.beta * d.s)

    def antideriv_phi(self) -> "TrigPoly":
        """Zero-mean antiderivative with respect to phi.

        Requires zero mean (a nonzero mean has no periodic antiderivative).
        """
        if abs(self.c[0]) > 1e-12:
            raise ValueError("antiderivative requires a zero-mean polynomial")
        n = len(self.c)
        c = np.zeros(n)
        s = np.zeros(n)
        for m in range(1, n):
            c[m] = -self.s[m] / (m * self.beta)
            s[m] = self.c[m] / (m * self.beta)
        return TrigPoly(self.beta, c, s)

    def __add__(self, other) -> "TrigPoly":
        if isinstance(other, (int, float)):
            c = self.c.copy()
            c[0] += other
            return TrigPoly(self.beta, c, self.s.copy())
        n = max(len(self.c), len(other.c))
        c = np.pad(self.c, (0, n - len(self.c))) + np.pad(other.c, (0, n - len(other.c)))
        s = np.pad(self.s, (0, n - len(self.s))) + np.pad(other.s, (0, n - len(other.s)))
        return TrigPoly(self.beta, c, s)

    def __sub__(self, other):
        return self + (other * -1.0 if isinstance(other, TrigPoly) else -other)

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return TrigPoly(self.beta, self.c * other, self.s * other)
        return self.product(other)

    __rmul__ = __mul__

    def product(self, other: "TrigPoly") -> "TrigPoly":
        """Exact product; resulting harmonics are sums/differences."""
        n1, n2 = len(self.c), len(other.c)
        n = n1 + n2 - 1
        c = np.zeros(n)
        s = np.zeros(n)
        for m in range(n1):
            for k in range(n2):
                a_c, a_s = self.c[m], self.s[m]
                b_c, b_s = other.c[k], other.s[k]
                # cos m * cos k
                c[m + k] += 0.5 * a_c * b_c
                c[abs(m - k)] += 0.5 * a_c * b_c
                # sin m * sin k
                c[abs(m - k)] += 0.5 * a_s * b_s
                c[m + k] -= 0.5 * a_s * b_s
                # cos m * sin k
                s[m + k] += 0.5 * a_c * b_s
                _accum_sin(s, k - m, 0.5 * a_c * b_s)
                # sin m * cos k
                s[m + k] += 0.5 * a_s * b_c
                _accum_sin(s, m - k, 0.5 * a_s * b_c)
        s[0] = 0.0
        return TrigPoly(self.beta, c, s)

    def mean_product(self, other: "TrigPoly") -> float:
        """Mean of the pointwise product over one period (exact)."""
        n = min(len(self.c), len(other.c))
        acc = self.c[0] * other.c[0]
        for m in range(1, n):
            acc += 0.5 * (self.c[m] * other.c[m] + self.s[m] * other.s[m])
        return float(acc)


def _accum_sin(s, m, val):
    if m > 0:
        s[m] += val
    elif m < 0:
        s[-m] -= val
    # sin(0) contributes nothing


def power_to_trig(beta: float, power_coeffs: dict) -> TrigPoly:
    """Convert ``sum coeff * cos(theta)^a * sin(theta)^b`` to harmonic form.

    ``power_coeffs`` maps ``(a, b)`` exponent pairs to coefficients.  Exact:
    expands cos = (e + 1/e)/2, sin = (e - 1/e)/(2i) with e = exp(i theta)
    and collects the real harmonic amplitudes term by term.
    """
    from math import comb

    deg = max((a + b for a, b in power_coeffs), default=0)
    c = np.zeros(deg + 1)
    s = np.zeros(deg + 1)
    for (a, b), coeff in power_coeffs.items():
        if coeff == 0.0:
            continue
        scale = coeff * (-1j) ** b / 2.0 ** (a + b)
        for k in range(a + 1):
            for l in range(b + 1):
                m = (2 * k - a) + (2 * l - b)
                z = scale * comb(a, k) * comb(b, l) * (-1.0) ** (b - l)
                # Re(z e^{im theta}) = Re(z) cos(m th) - Im(z) sin(m th)
                c[abs(m)] += z.real
                if m != 0:
                    s[abs(m)] += -z.imag if m > 0 else z.imag
    s[0] = 0.0
    return TrigPoly(beta=float(beta), c=c, s=s)
