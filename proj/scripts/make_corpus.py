#!/usr/bin/env python3
"""Builds the committed newform corpus under data/forms/.

Weight-2 eigenforms with prime-power level and ramified nebentypus are
constructed from scratch: the space M_2(N, chi) is spanned by weight-2
Eisenstein series and products of weight-1 Eisenstein series (all with
exactly known q-expansions), the Hecke operator T_2 (plus T_3 when needed)
is represented on that span, and the cuspidal eigenvectors are read off.
Every output passes a validation battery (a_1 = 1, Hecke multiplicativity,
prime-power recursion, Deligne bound, |a_p| = 1 at the ramified prime)
before it is written, so a construction bug cannot slip through silently.

The level-11 form is the classical eta product q prod (1-q^n)^2 (1-q^11n)^2.

Outputs (all committed):
  data/forms/*.wform            line-oriented coefficient files
  data/fixtures/remote_level25.json   fixture for the fetch-client tests
"""

import hashlib
import json
import math
import os
import sys

import numpy as np

ROOT = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..")
OUT = os.path.join(ROOT, "data", "forms")
FIX = os.path.join(ROOT, "data", "fixtures")


# ---------- characters mod p^c (discrete-log representation) ----------

class Char:
    def __init__(self, p, c, k):
        self.p, self.c, self.k = p, c, k
        self.q = p**c
        self.phi = self.q // p * (p - 1)
        g = smallest_primitive_root(p, c)
        self.g = g
        self.dlog = {}
        u = 1
        for j in range(self.phi):
            self.dlog[u] = j
            u = (u * g) % self.q
        self.vals = np.exp(2j * np.pi * np.arange(self.phi) * k / self.phi)

    def __call__(self, n):
        n = n % self.q
        if math.gcd(n, self.p) != 1:
            return 0.0
        return self.vals[self.dlog[n]]

    def table(self, n_max):
        t = np.zeros(n_max + 1, dtype=complex)
        for n in range(n_max + 1):
            t[n] = self(n)
        return t

    @property
    def conductor_exp(self):
        if self.k % self.phi == 0:
            return 0
        k = self.k
        v = 0
        while k % self.p == 0:
            k //= self.p
            v += 1
        return self.c - min(v, self.c - 1)

    @property
    def even(self):
        return self.k % 2 == 0


def smallest_primitive_root(p, c):
    q = p**c
    phi = q // p * (p - 1)
    fac = []
    m = phi
    d = 2
    while d * d <= m:
        if m % d == 0:
            fac.append(d)
            while m % d == 0:
                m //= d
        d += 1
    if m > 1:
        fac.append(m)
    for g in range(2, q):
        if g % p == 0:
            continue
        if all(pow(g, phi // f, q) != 1 for f in fac):
            return g
    raise RuntimeError("no primitive root")


# ---------- Eisenstein series ----------

def sigma_psi(n_max, psi_table, q_psi, weight_pow):
    """coefficients sum_{d|n} psi(d) d^weight_pow for n = 1..n_max (index 0 unused)"""
    out = np.zeros(n_max + 1, dtype=complex)
    for d in range(1, n_max + 1):
        pd = psi_table[d % q_psi] * d**weight_pow
        if pd == 0:
            continue
        out[d::d] += pd
    return out


def bernoulli_B1(psi, L):
    return sum(psi(a) * a for a in range(1, L + 1)) / L


def bernoulli_B2(psi, L):
    return sum(psi(a) * (a * a / L - a) for a in range(1, L + 1))


def eis_weight1(psi, L, n_max):
    """E_1^{1,psi} = -B_{1,psi}/2 + sum (sum_{d|n} psi(d)) q^n, psi odd mod L"""
    t = psi.table(L)
    e = sigma_psi(n_max, t, L, 0)
    e[0] = -bernoulli_B1(psi, L) / 2
    return e


def eis_weight2_fast(psi1, psi2, n_max):
    """E_2^{psi1,psi2} with psi1 trivial (psi1=None) or psi2 trivial (psi2=None)."""
    if psi1 is None:  # E_2^{1, chi}: sum_{d|n} chi(d) d, constant -B_{2,chi}/4
        t = psi2.table(psi2.q)
        e = sigma_psi(n_max, t, psi2.q, 1)
        e[0] = -bernoulli_B2(psi2, psi2.q) / 4
        return e
    # E_2^{chi, 1}: sum_{d|n} chi(n/d) d, constant 0
    t = psi1.table(psi1.q)
    out = np.zeros(n_max + 1, dtype=complex)
    for m in range(1, n_max + 1):  # m = n/d
        pm = t[m % psi1.q]
        if pm == 0:
            continue
        dvals = np.arange(1, n_max // m + 1)
        out[m * dvals] += pm * dvals
    return out


def series_mult(a, b, n_max):
    return np.convolve(a, b)[: n_max + 1]


# ---------- Hecke machinery on q-expansions ----------

def hecke_T(ell, series, chi_of_ell, n_keep):
    """(T_ell f)_n = b_{ell n} + chi(ell) ell b_{n/ell} for weight 2."""
    out = np.zeros(n_keep + 1, dtype=complex)
    for n in range(n_keep + 1):
        v = series[ell * n] if ell * n < len(series) else 0.0
        if n % ell == 0:
            v = v + chi_of_ell * ell * series[n // ell]
        out[n] = v
    return out


def extract_eigenforms(N, chi, cand, n_max, dim_expected, eis_eigs):
    """cand: list of q-series (length n_max+1) spanning M_2(N, chi).
    Returns list of cuspidal eigenform coefficient arrays, b_1 = 1."""
    B = 100  # leading coefficients used for linear algebra
    A = np.array([c[: B + 1] for c in cand]).T  # (B+1) x ncand
    # basis by column pivoting
    from scipy.linalg import qr
    q_, r_, piv = qr(A, pivoting=True)
    rank = int(np.sum(np.abs(np.diag(r_)) > 1e-9 * abs(r_[0, 0])))
    if rank != dim_expected:
        raise RuntimeError(f"span rank {rank} != expected dim {dim_expected}")
    basis = [cand[j] for j in piv[:rank]]
    Abas = np.array([b[: B + 1] for b in basis]).T

    def rep(op_series_list):
        """solve for the matrix of an operator from its action on the basis"""
        Y = np.array([s[: B + 1] for s in op_series_list]).T
        M, res, *_ = np.linalg.lstsq(Abas, Y, rcond=None)
        # verify the representation across many more coefficients
        for j, s in enumerate(op_series_list):
            recon = sum(M[i, j] * basis[i] for i in range(rank))
            k = min(len(s), n_max // 4)
            err = np.max(np.abs(recon[:k] - s[:k]))
            if err > 1e-7:
                raise RuntimeError(f"operator does not stabilize the span: {err}")
        return M

    c2 = complex(chi(2))
    c3 = complex(chi(3))
    T2 = rep([hecke_T(2, b, c2, B) for b in basis])
    T3 = rep([hecke_T(3, b, c3, B) for b in basis])
    # a generic combination separates eigenvectors even if T2 has collisions
    evals, evecs = np.linalg.eig(T2 + math.sqrt(2) * T3)

    forms = []
    for j in range(rank):
        v = evecs[:, j]
        series = sum(v[i] * basis[i] for i in range(rank))
        lam2 = (hecke_T(2, series, c2, 4)[1] / series[1]) if abs(series[1]) > 1e-9 else None
        if lam2 is None:
            continue
        # drop the Eisenstein eigenvectors
        if any(abs(lam2 - e) < 1e-6 for e in eis_eigs):
            continue
        if abs(series[0]) > 1e-8 * np.max(np.abs(series[:50])):
            raise RuntimeError("cuspidal candidate has nonzero constant term")
        series = series / series[1]
        forms.append(series)
    if len(forms) != dim_expected - len(eis_eigs):
        raise RuntimeError(f"found {len(forms)} cusp forms, expected {dim_expected - len(eis_eigs)}")
    forms.sort(key=lambda s: (round(s[2].real, 9), round(s[2].imag, 9)))
    return forms


def validate(N, chi, b, n_max):
    """b: arithmetic coefficients, b_1 = 1. Raises on any failure."""
    assert abs(b[1] - 1) < 1e-9, "a1 != 1"
    p_ram = [p for p in primes_upto(200) if N % p == 0]
    # multiplicativity over coprime pairs
    worst = 0.0
    for m in range(2, 200):
        for n in range(m + 1, n_max // m + 1):
            if math.gcd(m, n) != 1:
                continue
            worst = max(worst, abs(b[m * n] - b[m] * b[n]))
    assert worst < 1e-8, f"multiplicativity residual {worst}"
    # prime power recursion b_{p^{r+1}} = b_p b_{p^r} - chi(p) p b_{p^{r-1}}
    worst = 0.0
    for p in primes_upto(int(math.isqrt(n_max))):
        cp = complex(chi(p)) if chi is not None else (0.0 if N % p == 0 else 1.0)
        r = 1
        while p ** (r + 1) <= n_max:
            pred = b[p] * b[p**r] - cp * p * b[p ** (r - 1)]
            worst = max(worst, abs(b[p ** (r + 1)] - pred))
            r += 1
    assert worst < 1e-8, f"recursion residual {worst}"
    # Deligne bound |b_n| <= tau(n) sqrt(n)
    tau = np.zeros(n_max + 1)
    for d in range(1, n_max + 1):
        tau[d::d] += 1
    for n in range(1, n_max + 1):
        assert abs(b[n]) <= tau[n] * math.sqrt(n) * (1 + 1e-6), f"Deligne fails at {n}"
    # |b_p| = sqrt(p) (i.e. analytic |a_p| = 1) at ramified p with primitive nebentypus
    if chi is not None and chi.conductor_exp == chi.c:
        for p in p_ram:
            assert abs(abs(b[p]) - math.sqrt(p)) < 1e-8, f"|a_p| != 1 at {p}"


def primes_upto(n):
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for i in range(2, int(n**0.5) + 1):
        if sieve[i]:
            sieve[i * i :: i] = False
    return [int(i) for i in np.nonzero(sieve)[0]]


# ---------- analytic helpers (L-value, Petersson norm) ----------

def f_arith(b, z):
    """F(z) = sum b_n e^{2 pi i n z} (arithmetic normalization)."""
    y = z.imag
    M = min(len(b) - 1, max(40, int(40 / y)))
    n = np.arange(1, M + 1)
    return np.sum(b[1 : M + 1] * np.exp(2j * np.pi * n * z))


def al_eta_and_lvalue(N, b):
    """Pseudo-eigenvalue of z -> -1/(Nz) and central L-value (analytic s=1/2)."""
    y0 = 1 / math.sqrt(N)
    v = f_arith(b, 1j * y0)
    eta = -v / np.conj(v)
    # check the functional equation away from the fixed point
    ok = True
    for t in (1.35, 1.8):
        y = t / math.sqrt(N)
        lhs = f_arith(b, 1j / (N * y))
        rhs = -N * y * y * eta * np.conj(f_arith(b, 1j * y))
        if abs(lhs - rhs) > 1e-9 * (abs(lhs) + 1e-30):
            ok = False
    n = np.arange(1, len(b))
    w = np.exp(-2 * np.pi * n / math.sqrt(N)) / n
    L = np.sum((b[1:] - eta * np.conj(b[1:])) * w)
    return eta, (L if ok else None)


def reduce_point(N, x, y):
    """Gamma_0(N)-reduction to (nearly) maximal height."""
    for _ in range(64):
        x -= round(x)
        best = None
        kmax = int(1 / (N * y) ** 0.5) + 2
        for k in range(-kmax, kmax + 1):
            if k == 0:
                continue
            c = N * k
            d0 = -c * x
            for d in range(int(d0) - 2, int(d0) + 3):
                if math.gcd(abs(c), abs(d)) != 1:
                    continue
                nrm = (c * x + d) ** 2 + (c * y) ** 2
                if nrm < 1 - 1e-12 and (best is None or nrm < best[0]):
                    best = (nrm, c, d)
        if best is None:
            return x - round(x), y
        nrm, c, d = best
        # act by [[a,b],[c,d]]^{-1}-style: new z = (az+b)/(cz+d) with ad-bc=1
        a, bb = bezout(c, d)
        zx, zy = x, y
        den = (c * zx + d) ** 2 + (c * zy) ** 2
        x = ((a * zx + bb) * (c * zx + d) + a * c * zy * zy) / den
        y = zy / den
    return x - round(x), y


def bezout(c, d):
    """a, b with a d - b c = 1."""
    g, u, v = extended_gcd(d, -c)
    assert g == 1
    return u, v


def extended_gcd(a, b):
    if b == 0:
        return (a, 1, 0) if a > 0 else (-a, -1, 0)
    g, x, y = extended_gcd(b, a % b)
    return g, y, x - (a // b) * y


def f_inv(N, b, x, y):
    """Invariant value y |F(z)| evaluated after reduction."""
    rx, ry = reduce_point(N, x, y)
    return ry * abs(f_arith(b, rx + 1j * ry))


def cusps_gamma0_p2(p):
    """[(sigma matrix, width)] for Gamma_0(p^2): infinity, 0, a/p."""
    N = p * p
    cells = [((1, 0, 0, 1), 1)]
    cells.append(((0, -1, 1, 0), N))
    for a in range(1, p):
        g, u, v = extended_gcd(a, p)  # u a + v p = 1 -> det [[a, -v],[p, u]] = 1
        cells.append(((a, -v, p, u), 1))
    return cells


def petersson_norm(N, p, b, nx=24, ny=24):
    """(f,f) = int_{Gamma_0(N)\\H} (y|F|)^2 dmu by cusp-cell quadrature."""
    V = 4.0
    gx, wx = np.polynomial.legendre.leggauss(nx)
    gt, wt = np.polynomial.legendre.leggauss(ny)
    total = 0.0
    for (sa, sb, sc, sd), width in cusps_gamma0_p2(p):
        ycap = V * width
        for j in range(width):
            # cell sigma * T^j, integrate over F_1 truncated at ycap
            for xi, wxi in zip(gx, wx):
                x = 0.5 * xi  # [-1/2, 1/2]
                yf = math.sqrt(max(0.0, 1 - x * x))
                t0, t1 = 1 / ycap, 1 / yf
                for ti, wti in zip(gt, wt):
                    t = 0.5 * (t1 - t0) * ti + 0.5 * (t0 + t1)
                    y = 1 / t
                    # w = sigma T^j z
                    zx, zy = x + j, y
                    den = (sc * zx + sd) ** 2 + (sc * zy) ** 2
                    wxp = ((sa * zx + sb) * (sc * zx + sd) + sa * sc * zy * zy) / den
                    wyp = zy / den
                    v = f_inv(N, b, wxp, wyp)
                    total += wxi * wti * 0.5 * 0.5 * (t1 - t0) * v * v
    return total


# ---------- file output ----------

def write_form(path, N, p, c, k, g, emb, a_analytic, lvalue=None, pet=None, pet_err=None,
               source=""):
    lines = []
    for n in range(1, len(a_analytic)):
        lines.append("%d %.17g %.17g" % (n, a_analytic[n].real, a_analytic[n].imag))
    block = ("\n".join(lines) + "\n") if lines else ""
    digest = hashlib.sha256(block.encode()).hexdigest()
    with open(path, "w") as f:
        f.write("#wlab-form v1\n")
        f.write(f"level: {N}\n")
        f.write("weight: 2\n")
        f.write(f"char: p={p} c={c} k={k} g={g}\n")
        f.write(f"embedding: {emb}\n")
        f.write(f"count: {max(0, len(a_analytic) - 1)}\n")
        if lvalue is not None:
            f.write("lvalue: %.17g %.17g\n" % (lvalue.real, lvalue.imag))
        if pet is not None:
            f.write("petersson: %.17g\n" % pet)
        if pet_err is not None:
            f.write("petersson_err: %.17g\n" % pet_err)
        f.write(f"source: {source}\n")
        f.write(f"sha256: {digest}\n")
        f.write(block)
    print(f"  wrote {os.path.relpath(path, ROOT)}")


def analytic(b):
    a = np.array(b, dtype=complex)
    n = np.arange(len(a))
    a[1:] = a[1:] / np.sqrt(n[1:])
    return a


# ---------- builders ----------

def build_prime_square_level(p, k_char, n_max, dim_S, tag):
    N = p * p
    chi = Char(p, 2, k_char)
    assert chi.even and chi.conductor_exp == 2
    phi = chi.phi

    # candidates: E2 pair + products of weight-1 Eisenstein series
    cand = [eis_weight2_fast(None, chi, n_max), eis_weight2_fast(chi, None, n_max)]
    odd_ks = [k for k in range(phi) if k % 2 == 1]
    seen = set()
    for k1 in odd_ks:
        k2 = (k_char - k1) % phi
        if k2 % 2 != 1:
            continue
        key = (min(k1, k2), max(k1, k2))
        if key in seen:
            continue
        seen.add(key)
        e1 = eis_weight1(Char(p, 2, k1), N, n_max)
        e2 = eis_weight1(Char(p, 2, k2), N, n_max)
        cand.append(series_mult(e1, e2, n_max))
        if len(cand) >= dim_S + 2 + 4:
            break

    eis_eigs = [1 + 2 * complex(chi(2)), complex(chi(2)) + 2]
    forms = extract_eigenforms(N, chi, cand, n_max, dim_S + 2, eis_eigs)
    print(f"level {N} char k={k_char}: {len(forms)} newform embedding(s)")

    out = []
    for emb, b in enumerate(forms):
        validate(N, chi, b, len(b) - 1)
        eta, L = al_eta_and_lvalue(N, b)
        pn1 = petersson_norm(N, p, b, 20, 20)
        pn2 = petersson_norm(N, p, b, 28, 28)
        pet_err = abs(pn2 - pn1)
        print(f"  emb {emb}: b2={b[2]:.6f} |eta|={abs(eta):.12f} L={L} "
              f"(f,f)={pn2:.8g} err~{pet_err:.2g}")
        path = os.path.join(OUT, f"{N}.2.{tag}.{emb}.wform")
        write_form(path, N, p, 2, k_char, chi.g, emb, analytic(b), L, pn2, 2 * pet_err,
                   source="eisenstein-product basis + hecke eigendecomposition"
                          " (scripts/make_corpus.py)")
        out.append((b, pn2))
    return chi, forms, out


def build_level11(n_max):
    # eta(z)^2 eta(11z)^2 = q prod (1-q^n)^2 (1-q^{11n})^2
    c = np.zeros(n_max + 2, dtype=np.int64)
    c[0] = 1
    for m in range(1, n_max + 1):
        for _ in range(2):
            c[m:] -= c[:-m].copy()
    for m in range(11, n_max + 1, 11):
        for _ in range(2):
            c[m:] -= c[:-m].copy()
    # coefficient of q^n in q * prod is c[n-1]
    b = np.zeros(n_max + 1, dtype=complex)
    for n in range(1, n_max + 1):
        b[n] = float(c[n - 1])
    validate(11, None, b, n_max)
    print(f"level 11: eta product ok, b2={b[2].real:g} b3={b[3].real:g}")
    path = os.path.join(OUT, "11.2.a.0.wform")
    write_form(path, 11, 11, 0, 0, 2, 0, analytic(b),
               source="eta(z)^2 eta(11z)^2 product expansion (scripts/make_corpus.py)")
    return b


def main():
    os.makedirs(OUT, exist_ok=True)
    os.makedirs(FIX, exist_ok=True)
    np.random.seed(7)

    # level 25: order-5 character (dim 1) and order-10 character (dim 2)
    chi_d, forms_d, _ = build_prime_square_level(5, 4, 6000, 1, "d")
    chi_e, forms_e, out_e = build_prime_square_level(5, 2, 6000, 2, "e")

    # level 49: order-7 character k=6 (dim 3)
    build_prime_square_level(7, 6, 5000, 3, "g")

    # level 11 trivial character (oldform-pullback and Steinberg-side tests)
    build_level11(3000)

    # level 9: the primitive even characters mod 9 carry no weight-2 forms
    for k in (2, 4):
        chi9 = Char(3, 2, k)
        path = os.path.join(OUT, f"9.2.k{k}.empty.wform")
        with open(path, "w") as f:
            f.write("#wlab-form v1\nlevel: 9\nweight: 2\n")
            f.write(f"char: p=3 c=2 k={k} g={chi9.g}\n")
            f.write("empty: true\ncount: 0\n")
            f.write("source: dimension 0 space (scripts/make_corpus.py)\n")
            f.write(f"sha256: {hashlib.sha256(b'').hexdigest()}\n")
        print(f"  wrote {os.path.relpath(path, ROOT)}")

    # fetch fixture: arithmetic-normalization coefficients, level 25 order-10
    emb_list = []
    for emb, (b, pet) in enumerate(out_e):
        eta, L = al_eta_and_lvalue(25, b)
        emb_list.append({
            "index": emb,
            "an": [[float(b[n].real), float(b[n].imag)] for n in range(1, 2501)],
            "lvalue": [float(L.real), float(L.imag)] if L is not None else None,
            "petersson": float(pet),
        })
    fixture = {
        "level": 25, "weight": 2,
        "char": {"p": 5, "c": 2, "k": 2, "generator": 2},
        "count": 2500,
        "embeddings": emb_list,
    }
    with open(os.path.join(FIX, "remote_level25.json"), "w") as f:
        json.dump(fixture, f)
    print("  wrote data/fixtures/remote_level25.json")

    # quick report of the headline numbers for the order-10 level-25 form
    for emb, b in enumerate(forms_e):
        a = analytic(b)
        tw = math.sqrt(5) * sum(a[n] * math.sqrt(n) * math.exp(-2 * math.pi * n)
                                for n in range(1, 200) if n % 5 == 1)
        bp = find_b_param(chi_e)
        ax = pow(bp, -1, 5)
        zx = ax / 5 + 1j / 125
        n = np.arange(1, len(a))
        direct = (1 / 125) * np.sum(a[1:] * np.sqrt(n) * np.exp(2j * np.pi * n * zx))
        print(f"emb {emb}: |phi_tw(i)| = {abs(tw):.10f}  |f(z_chi)| = {abs(direct):.10f}"
              f"  (sqrt5 e^-2pi = {math.sqrt(5)*math.exp(-2*math.pi):.10f}, b={bp}, a={ax})")


def find_b_param(chi):
    p = chi.p
    for b in range(1, p):
        ok = all(abs(chi(1 - p * z) - np.exp(2j * np.pi * b * z / p)) < 1e-9 for z in range(p))
        if ok:
            return b
    raise RuntimeError("no b")


if __name__ == "__main__":
    sys.exit(main())
