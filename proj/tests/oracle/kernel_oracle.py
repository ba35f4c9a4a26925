#!/usr/bin/env python3
"""Independent high-precision oracle for the special functions.

Every value is computed from the defining integrals with mpmath at 30+
significant digits, without any of the shortcuts used by the C++ library
(no continued fractions, no Hermite tables, no closed-form derivative of G).

Usage: kernel_oracle.py [output]   (default: golden/kernel.txt)
       kernel_oracle.py --check golden/kernel.txt
"""
import sys
import mpmath as mp

mp.mp.dps = 34


def log_cdf(x):
    return mp.log(mp.ncdf(x))


def k(x):
    # k(x) = x^2/2 + log(int_{-inf}^x e^{-s^2/2} ds)
    return x * x / 2 + mp.log(mp.sqrt(2 * mp.pi)) + log_cdf(x)


def inv_mills(x):
    return mp.npdf(x) / mp.ncdf(x)


def k1(x):
    extra = int(mp.log10(abs(x) + 1)) + 5
    with mp.extradps(extra):
        r = x + inv_mills(x)
    return +r


def k2(x):
    # 1 - (x + m) m cancels like x^-2 as x -> -inf; widen the working precision.
    extra = int(2 * mp.log10(abs(x) + 1)) + 5
    with mp.extradps(extra):
        m = inv_mills(x)
        r = 1 - (x + m) * m
    return +r


def inv_k1(u):
    """Root of k'(t) = u by bisection on the bracket [-1/u - 1, u + 1]."""
    lo, hi = -1 / u - 1, u + 1
    for _ in range(400):
        mid = (lo + hi) / 2
        if k1(mid) < u:
            lo = mid
        else:
            hi = mid
        if hi - lo < mp.mpf(10) ** (-28) * max(1, abs(mid)):
            break
    return (lo + hi) / 2


def F(x):
    """F(x) = int_0^x exp(k(inv_k1(u))) du, rewritten with u = k'(t) as
    int_{-inf}^{inv_k1(x)} exp(k(t)) k''(t) dt so only one root is needed.

    The integrand behaves like |t|^-3 as t -> -inf; below t = -L the tail is
    1/(2 L^2) up to a relative O(L^-2) correction.
    """
    if x == 0:
        return mp.mpf(0)
    L = mp.mpf(10) ** 6
    T = inv_k1(x)
    f = lambda t: mp.ncdf(t) / mp.npdf(t) * k2(t)
    pts = [-L, -1000, -100, -30]
    pts = [p for p in pts if p < T]
    if T > -10:
        pts += [p for p in mp.linspace(-10, T, 8) if p > pts[-1]]
    if pts[-1] != T:
        pts.append(T)
    return 1 / (2 * L * L) + mp.quad(f, pts)


def G(s):
    """Brute-force double integral int_s^inf int_r^inf u^-2 e^{(r^2-u^2)/2} du dr."""
    with mp.workdps(20):
        inner = lambda r: mp.quad(lambda u: u ** -2 * mp.exp((r - u) * (r + u) / 2), [r, r + 1, mp.inf])
        return mp.quad(inner, [s, 2 * s, 10 * s + 10, mp.inf])


def endpoint_gap_half_sine():
    """E log g + E F(|g'|/g) - log E g for g = exp(0.5 sin x), X ~ N(0,1).

    E log g = 0 by symmetry. F on [0, 0.5] is sampled at Chebyshev nodes and
    interpolated, then integrated against the Gaussian weight.
    """
    n = 48
    a, b = mp.mpf(0), mp.mpf("0.5")
    nodes = [(a + b) / 2 + (b - a) / 2 * mp.cos(mp.pi * (j + mp.mpf(1) / 2) / n) for j in range(n)]
    vals = [F(t) for t in nodes]

    def F_interp(t):
        # Barycentric formula for first-kind Chebyshev points.
        num = den = mp.mpf(0)
        for j in range(n):
            if t == nodes[j]:
                return vals[j]
            wj = (-1) ** j * mp.sin(mp.pi * (j + mp.mpf(1) / 2) / n)
            c = wj / (t - nodes[j])
            num += c * vals[j]
            den += c
        return num / den

    phi = lambda z: mp.npdf(z)
    mid = mp.quad(lambda z: F_interp(abs(mp.cos(z)) / 2) * phi(z), mp.linspace(-12, 12, 25))
    log_e_g = mp.log(mp.quad(lambda z: mp.exp(mp.sin(z) / 2) * phi(z), mp.linspace(-12, 12, 25)))
    return mid - log_e_g


def compute():
    rows = []

    def add(name, value, tol):
        rows.append((name, value, tol))

    add("inv_mills(0)", inv_mills(mp.mpf(0)), 1e-15)
    add("inv_mills(-10)", inv_mills(mp.mpf(-10)), 1e-13)
    add("inv_mills(-3)", inv_mills(mp.mpf(-3)), 1e-13)
    add("inv_mills(5)", inv_mills(mp.mpf(5)), 1e-13)
    add("k(0)", k(mp.mpf(0)), 1e-15)
    add("k(-20)", k(mp.mpf(-20)), 1e-13)
    add("k(7)", k(mp.mpf(7)), 1e-13)
    add("k1(-20)", k1(mp.mpf(-20)), 1e-13)
    add("k2(0)", k2(mp.mpf(0)), 1e-15)
    add("k2(-20)", k2(mp.mpf(-20)), 1e-12)
    add("k2(-4)", k2(mp.mpf(-4)), 1e-12)
    add("inv_k1(0.001)", inv_k1(mp.mpf("0.001")), 1e-12)
    add("inv_k1(100)", inv_k1(mp.mpf(100)), 1e-12)
    add("inv_k1(0.5)", inv_k1(mp.mpf("0.5")), 1e-12)
    for x in ["0.5", "1", "2", "4", "6"]:
        add(f"F({x})", F(mp.mpf(x)), 1e-10)
    for x in ["10", "20"]:
        add(f"logF({x})", mp.log(F(mp.mpf(x))), 1e-10)
    for s in ["0.01", "0.5", "1", "3", "10", "50"]:
        add(f"G({s})", G(mp.mpf(s)), 1e-9)
    add("endpoint_gap(exp(0.5 sin x))", endpoint_gap_half_sine(), 1e-9)
    return rows


def fmt(v):
    return mp.nstr(v, 20, min_fixed=-3, max_fixed=3)


def write(path, rows):
    with open(path, "w") as out:
        out.write("# name\tvalue\ttolerance (relative)\n")
        for name, value, tol in rows:
            out.write(f"{name}\t{fmt(value)}\t{tol:.0e}\n")


def check(path, rows):
    golden = {}
    with open(path) as f:
        for line in f:
            if line.startswith("#") or not line.strip():
                continue
            name, value, tol = line.rstrip("\n").split("\t")
            golden[name] = (mp.mpf(value), float(tol))
    bad = 0
    for name, value, _ in rows:
        ref, tol = golden[name]
        rel = abs(value - ref) / max(abs(ref), mp.mpf(1e-300))
        if rel > 1e-15:
            print(f"MISMATCH {name}: golden {ref} oracle {value}")
            bad += 1
    return bad


if __name__ == "__main__":
    if len(sys.argv) > 2 and sys.argv[1] == "--check":
        sys.exit(1 if check(sys.argv[2], compute()) else 0)
    write(sys.argv[1] if len(sys.argv) > 1 else "golden/kernel.txt", compute())
