import numpy as np
import pytest

from hopfscope.errors import FitError
from hopfscope.model import normal_form
from hopfscope.taylor import (
    CUBIC_INDICES,
    QUAD_INDICES,
    TaylorData,
    extract_taylor,
    taylor_of_model,
    taylor_poly,
)


def linear_block(beta=1.0, alpha=0.0):
    return np.array([[-1.0, 0.0, 0.0], [0.0, alpha, -beta], [0.0, beta, alpha]])


def make_field(quad=None, cubic=None, beta=1.0, alpha=0.0):
    """Synthetic field: linear block + prescribed ordered polynomial terms."""
    quad = quad or {}
    cubic = cubic or {}
    L = linear_block(beta, alpha)

    def fun(x):
        x = np.asarray(x, dtype=float)
        out = L @ x
        comp = {"a": 0, "b": 1, "c": 2}
        for (sigma, idx), coeff in quad.items():
            out[comp[sigma]] += coeff * x[idx[0] - 1] * x[idx[1] - 1]
        for (sigma, idx), coeff in cubic.items():
            out[comp[sigma]] += coeff * x[idx[0] - 1] * x[idx[1] - 1] * x[idx[2] - 1]
        return out

    return fun


def all_coeffs(td):
    vals = {}
    for sigma in "abc":
        for idx in QUAD_INDICES:
            vals[(sigma, idx)] = td.quad[sigma][idx]
        for idx in CUBIC_INDICES:
            vals[(sigma, idx)] = td.cubic[sigma][idx]
    return vals


class TestSyntheticFields:
    def test_single_quadratic_term(self):
        fun = make_field(quad={("a", (2, 2)): 1.0})
        td = extract_taylor(fun, alpha=0.0, beta=1.0)
        got = all_coeffs(td)
        assert got.pop(("a", (2, 2))) == pytest.approx(1.0, abs=1e-7)
        assert max(abs(v) for v in got.values()) < 1e-7

    def test_single_cubic_term(self):
        fun = make_field(cubic={("b", (2, 2, 2)): 1.0})
        td = extract_taylor(fun, alpha=0.0, beta=1.0)
        got = all_coeffs(td)
        assert got.pop(("b", (2, 2, 2))) == pytest.approx(1.0, abs=1e-7)
        assert max(abs(v) for v in got.values()) < 1e-7

    def test_polynomial_passthrough_is_exact(self):
        rng = np.random.default_rng(3)
        quad = {("a", idx): rng.normal() for idx in QUAD_INDICES}
        quad.update({("b", idx): rng.normal() for idx in QUAD_INDICES})
        cubic = {("c", idx): rng.normal() for idx in CUBIC_INDICES}
        td = extract_taylor(make_field(quad=quad, cubic=cubic), alpha=0.0, beta=1.0)
        got = all_coeffs(td)
        # third-derivative stencils divide float rounding by 2 h^3 = 2e-9,
        # so "exact" recovery carries a ~1e-8 noise floor
        for key, want in {**quad, **cubic}.items():
            assert got[key] == pytest.approx(want, abs=2e-8)

    def test_linearity(self):
        rng = np.random.default_rng(4)
        q1 = {("a", idx): rng.normal() for idx in QUAD_INDICES[:4]}
        q2 = {("c", idx): rng.normal() for idx in QUAD_INDICES[2:]}
        f1, f2 = make_field(quad=q1), make_field(quad=q2)

        def fsum(x):
            return f1(x) + f2(x) - linear_block() @ np.asarray(x, dtype=float)

        td1 = extract_taylor(f1, 0.0, 1.0)
        td2 = extract_taylor(f2, 0.0, 1.0)
        tds = extract_taylor(fsum, 0.0, 1.0)
        a1, a2, asum = all_coeffs(td1), all_coeffs(td2), all_coeffs(tds)
        for key in asum:
            assert asum[key] == pytest.approx(a1[key] + a2[key], abs=1e-9)

    def test_nonsmooth_field_rejected(self):
        # |x| factor breaks the r^4 remainder scaling
        def fun(x):
            x = np.asarray(x, dtype=float)
            out = linear_block() @ x
            out[1] += np.linalg.norm(x) * x[1] ** 2
            return out

        with pytest.raises(FitError):
            extract_taylor(fun, 0.0, 1.0)


class TestCombustionExtraction:
    def test_against_least_squares_oracle(self, hopf):
        # independent oracle: degree-5 polynomial least squares on a random
        # cloud of radius 1e-2 (parity keeps odd/even orders separated)
        nf = normal_form(0.0, 3.0)
        td = taylor_of_model(0.0, 3.0)

        rng = np.random.default_rng(11)
        n = 900
        X = rng.normal(size=(n, 3))
        X /= np.linalg.norm(X, axis=1)[:, None]
        X *= 1e-2 * rng.uniform(0.3, 1.0, size=n)[:, None]
        mons = [
            (i, j, k)
            for d in range(6)
            for i in range(d + 1)
            for j in range(d - i + 1)
            for k in (d - i - j,)
        ]
        r = 1e-2
        Phi = np.column_stack(
            [
                (X[:, 0] ** i) * (X[:, 1] ** j) * (X[:, 2] ** k) / r ** (i + j + k)
                for (i, j, k) in mons
            ]
        )
        F = np.array([nf.field(x) for x in X])
        coef, *_ = np.linalg.lstsq(Phi, F, rcond=None)
        oracle = {}
        for m_i, (i, j, k) in enumerate(mons):
            d = i + j + k
            if d in (2, 3):
                oracle[(i, j, k)] = coef[m_i] / r**d

        scale = max(
            abs(v) for tab in (td.quad, td.cubic) for s in "abc" for v in tab[s].values()
        )
        for sigma_i, sigma in enumerate("abc"):
            for idx, got in {**td.quad[sigma], **td.cubic[sigma]}.items():
                e = [0, 0, 0]
                for i in idx:
                    e[i - 1] += 1
                want = oracle[tuple(e)][sigma_i]
                assert got == pytest.approx(want, rel=1e-5, abs=1e-5 * scale)

    def test_reconstruction_scaling(self, taylor_p3):
        nf = normal_form(0.0, 3.0)
        td = taylor_p3
        L = nf.linear.block
        rng = np.random.default_rng(12)
        dirs = rng.normal(size=(60, 3))
        dirs /= np.linalg.norm(dirs, axis=1)[:, None]
        radii = [1e-2, 5e-3, 2.5e-3]
        maxres = []
        for r in radii:
            res = max(
                float(np.max(np.abs(nf.field(r * d) - L @ (r * d) - taylor_poly(td, r * d))))
                for d in dirs
            )
            maxres.append(res)
        for r0, r1 in zip(maxres, maxres[1:]):
            assert 12.0 <= r0 / r1 <= 20.0

    def test_beta_metadata(self, taylor_p3):
        assert taylor_p3.beta == pytest.approx(np.sqrt(3), abs=1e-6)
        assert taylor_p3.alpha == pytest.approx(0.0, abs=1e-10)


class TestSerialization:
    def test_json_roundtrip(self, taylor_p3):
        text = taylor_p3.to_json()
        back = TaylorData.from_json(text)
        assert back.alpha == taylor_p3.alpha
        assert back.beta == taylor_p3.beta
        for sigma in "abc":
            assert back.quad[sigma] == taylor_p3.quad[sigma]
            assert back.cubic[sigma] == taylor_p3.cubic[sigma]

    def test_documented_keys(self, taylor_p3):
        import json

        obj = json.loads(taylor_p3.to_json())
        assert set(obj) == {
            "alpha",
            "beta",
            "a_ij",
            "a_ijk",
            "b_ij",
            "b_ijk",
            "c_ij",
            "c_ijk",
        }
        assert "122" in obj["a_ijk"]
        assert "23" in obj["b_ij"]

    def test_coeff_lookup(self, taylor_p3):
        assert taylor_p3.coeff("a23") == taylor_p3.quad["a"][(2, 3)]
        assert taylor_p3.coeff("b222") == taylor_p3.cubic["b"][(2, 2, 2)]
