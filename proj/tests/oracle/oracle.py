"""Independent high-precision reference values, frozen into tests/oracle_values.hpp.

Run: python3 tests/oracle/oracle.py > tests/oracle_values.hpp
"""
import mpmath as mp

mp.mp.dps = 40
PI = mp.pi


def H(t, x):
    return -mp.log(abs(t * t - x * x)) / (4 * PI)


def theta(v):
    return 1 if v > 0 else 0


def dirac(t, x):
    return -mp.mpf(1) / 4 * (theta(t - abs(x)) + theta(-t - abs(x)))


def feynman(t, x):
    return mp.mpc(H(t, x), dirac(t, x))


def bump(s):
    s = mp.mpf(s)
    return mp.e ** (1 - 1 / (1 - s * s)) if abs(s) < 1 else mp.mpf(0)


def bump_d(s):
    s = mp.mpf(s)
    if abs(s) >= 1:
        return mp.mpf(0)
    return bump(s) * (-2 * s / (1 - s * s) ** 2)


def log_factorial(n):
    return mp.loggamma(n + 1)


def explicit_bound_log(n, r, beta, lam, hbar, p):
    q = p / (p - 1)
    bp = beta * p
    L = 4 * r
    cc = 2 * L ** (2 - bp) / ((1 - bp) * (2 - bp))
    gq = mp.log(2 * 4 * r * r)
    terms = []
    for k in range(n + 1):
        kp = min(k, n - k)
        m = n - 2 * kp
        lx = (log_factorial(n - kp) - log_factorial(m) + m * mp.log(L)
              + bp * mp.mpf(m * (m - 1)) / 2 * mp.log(L) + kp * mp.log(cc))
        terms.append(mp.log(mp.binomial(n, k)) + (2 / p) * lx)
    return (n * mp.log(lam / (2 * hbar)) - log_factorial(n) - n * mp.log(2) + (n / q) * gq
            + mp.log(mp.fsum(mp.e ** t for t in terms)))


def bound_constant(r, beta):
    p = (1 + 1 / mp.mpf(beta)) / 2
    best = -mp.inf
    for n in range(2, 201):
        h = n // 2
        lform = mp.log(h) - (1 - 1 / p) * log_factorial(h)
        best = max(best, (explicit_bound_log(n, r, mp.mpf(beta), 1, 1, p) - lform) / n)
    return mp.e ** best


def holder(n, p):
    p = mp.mpf(p)
    lhs = mp.fsum(mp.e ** (-log_factorial(n - k) - log_factorial(k)
                           + (log_factorial(n - k) - log_factorial(n - 2 * k)) / p)
                  for k in range(n // 2 + 1))
    h = n // 2
    rhs = h / mp.factorial(h) ** (1 - 1 / p)
    return lhs, rhs


def cv_det(z, w):
    l = len(w)
    m = l - len(z)
    rows = [[mp.mpf(wj) ** i for wj in w] for i in range(m)]
    rows += [[1 / (mp.mpf(zi) - wj) for wj in w] for zi in z]
    return mp.det(mp.matrix(rows))


def w_minus(z, w, beta):
    v = mp.mpf(1)
    for i in range(len(z)):
        for j in range(i + 1, len(z)):
            v *= abs(mp.mpf(z[i]) - z[j]) ** beta
    for i in range(len(w)):
        for j in range(i + 1, len(w)):
            v *= abs(mp.mpf(w[i]) - w[j]) ** beta
    for zi in z:
        for wj in w:
            v *= abs(mp.mpf(zi) - wj) ** (-beta)
    return v


def tn(charges, pts, hbar, phi_const):
    lg = mp.mpc(0)
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            t = pts[i][0] - pts[j][0]
            x = pts[i][1] - pts[j][1]
            lg -= charges[i] * charges[j] * hbar * feynman(t, x)
    lg += 1j * phi_const * sum(charges)
    return mp.e ** lg


def conv_far(x0, r, mu):
    # int H(x - y) d_mu g(y) dy for g the unit bump at the origin, x spacelike to the whole box
    def f(s, u):
        yt, yx = r * s, r * u
        dg = bump_d(s) * bump(u) if mu == 0 else bump(s) * bump_d(u)
        return H(x0[0] - yt, x0[1] - yx) * dg * r  # dy = r^2 ds du, d_mu carries 1/r
    return mp.quad(f, [-1, 0, 1], [-1, 0, 1])


def cpp(name, v):
    return f"inline constexpr double {name} = {mp.nstr(v, 20, min_fixed=-mp.inf, max_fixed=mp.inf)};"


out = []
add = out.append
add("// Generated by tests/oracle/oracle.py (mpmath, 40 digits). Do not edit.")
add("#pragma once")
add("")
add("namespace oracle {")
add("")
add(cpp("hadamard_2_0", H(2, 0)))
add(cpp("w1_2_0_re", H(2, 0)))
add(cpp("w1_2_0_im", -mp.mpf(1) / 4))
w2 = mp.mpc(H(2, 0), -mp.mpf(1) / 4) ** 2  # W = H - i/4 in the future cone
add(cpp("w2_2_0_re", w2.real))
add(cpp("w2_2_0_im", w2.imag))
add(cpp("grad_t_hadamard_2_0", -(2 * 2) / (4 * PI * 4)))
add("")
for name, z in [("k0_1", 1), ("k0_0p05", mp.mpf("0.05")), ("k0_1p9", mp.mpf("1.9")), ("k0_3", 3), ("k0_12", 12)]:
    add(cpp(name, mp.besselk(0, z)))
k = mp.besselk(0, mp.mpc(0, 2))
add(cpp("k0_2i_re", k.real))
add(cpp("k0_2i_im", k.imag))
k = mp.besselk(0, mp.mpc("0.5", "0.3"))
add(cpp("k0_c_re", k.real))
add(cpp("k0_c_im", k.imag))
k = mp.besselk(0, mp.mpc("2.5", "4"))
add(cpp("k0_far_re", k.real))
add(cpp("k0_far_im", k.imag))
i0 = mp.besseli(0, mp.mpc("0.7", "0.2"))
add(cpp("i0_c_re", i0.real))
add(cpp("i0_c_im", i0.imag))
add(cpp("massive_feynman_0_1", mp.besselk(0, 1) / (2 * PI)))
k = mp.besselk(0, mp.mpc(0, 2)) / (2 * PI)
add(cpp("massive_feynman_2_0_re", k.real))
add(cpp("massive_feynman_2_0_im", k.imag))
add(cpp("massless_limit_constant_mu1", -(mp.log(mp.mpf(1) / 2) + mp.euler) / (2 * PI)))
add("")
# Cauchy and Vandermonde
z3, w3 = [mp.mpf("0.3")], [mp.mpf("-0.2"), mp.mpf("0.7")]
add(cpp("cv_n3_k1", cv_det(z3, w3)))
z4, w4 = [mp.mpf("0.1"), mp.mpf("0.9")], [mp.mpf("-0.4"), mp.mpf("0.35")]
add(cpp("cauchy_n4_k2", cv_det(z4, w4)))
z5 = [mp.mpf("0.15")]
w5 = [mp.mpf(v) for v in ("-0.8", "-0.3", "0.05", "0.45", "0.9")][:4]
add(cpp("cv_n5_k1", cv_det(z5, w5)))
z8 = [mp.mpf("-0.61"), mp.mpf("0.27")]
w8 = [mp.mpf(v) for v in ("-0.93", "-0.44", "-0.05", "0.12", "0.58", "0.81")]
add(cpp("cv_n8_k2", cv_det(z8, w8)))
add(cpp("vandermonde_4", mp.det(mp.matrix([[mp.mpf(u) ** i for u in ("-0.5", "0.1", "0.4", "1.2")] for i in range(4)]))))
add(cpp("w_minus_n3_k1_beta_half", w_minus(z3, w3, mp.mpf("0.5"))))
add(cpp("abs_det_n8_k2_pow_beta", abs(cv_det(z8, w8)) ** mp.mpf("0.5")))
add(cpp("w_minus_n8_k2_beta_half", w_minus(z8, w8, mp.mpf("0.5"))))
add("")
# vertex kernels, beta = 1/2 (a^2 hbar = 2 pi), hbar = 1
a = mp.sqrt(2 * PI)
pts = [(mp.mpf("0.1"), mp.mpf("0.05")), (mp.mpf("-0.3"), mp.mpf("0.2")), (mp.mpf("0.45"), mp.mpf("-0.1"))]
v = tn([a, a, -a], pts, 1, mp.mpf("0.3"))
add(cpp("tn3_re", v.real))
add(cpp("tn3_im", v.imag))
pts4 = pts + [(mp.mpf("0.02"), mp.mpf("0.6"))]
v = tn([a, -a, -a, a], pts4, 1, 0)
add(cpp("tn4_re", v.real))
add(cpp("tn4_im", v.imag))
add("")
# cutoff and bound chain
one_d = mp.quad(bump, [-1, 0, 1])
add(cpp("bump_unit_integral_1d", one_d))
for beta, tag in (("0.25", "q"), ("0.5", "h"), ("0.75", "t")):
    add(cpp(f"bound_constant_r02_beta_{tag}", bound_constant(mp.mpf("0.2"), mp.mpf(beta))))
add(cpp("explicit_bound_n4_r02_beta_h", mp.e ** explicit_bound_log(4, mp.mpf("0.2"), mp.mpf("0.5"), 1, 1, mp.mpf("1.5"))))
for n, p in ((2, 2), (4, 2), (10, 3)):
    lhs, rhs = holder(n, p)
    add(cpp(f"holder_lhs_n{n}_p{p}", lhs))
    add(cpp(f"holder_rhs_n{n}_p{p}", rhs))
add("")
# convolution with x spacelike to supp g (unit bump at origin, r = 0.2)
add(cpp("conv_far_mu0", conv_far((mp.mpf("0.1"), mp.mpf("1.5")), mp.mpf("0.2"), 0)))
add(cpp("conv_far_mu1", conv_far((mp.mpf("0.1"), mp.mpf("1.5")), mp.mpf("0.2"), 1)))
add("")
add("} // namespace oracle")
print("\n".join(out))
