#!/usr/bin/env python3
"""Reference values for the unit tests, computed with mpmath.

Writes tests/oracles/frozen.hpp.  Everything here is evaluated from the
textbook definitions (incomplete gamma, Meijer G, direct quadrature), never
from the library under test.

    python3 tests/oracles/generate.py
"""
import itertools
import os

import mpmath as mp

mp.mp.dps = 30
HERE = os.path.dirname(os.path.abspath(__file__))
ROOT = os.path.dirname(os.path.dirname(HERE))

C_LIGHT = 299792458.0


def friis(f, d, gt_db, gr_db, eta=2.0):
    g = mp.sqrt(mp.mpf(10) ** (mp.mpf(gt_db) / 10) * mp.mpf(10) ** (mp.mpf(gr_db) / 10))
    return C_LIGHT * g / (4 * mp.pi * f) * mp.mpf(d) ** (-mp.mpf(eta) / 2)


class Model:
    """Dual-hop link with the default geometry and absorption coefficient kappa."""

    def __init__(self, alpha, mu, omega, phi, s0, m, omega_m, snr_db, kappa=4e-4,
                 d_sr=300.0, d_rd=800.0):
        self.alpha, self.mu, self.omega = map(mp.mpf, (alpha, mu, omega))
        self.phi, self.s0, self.m, self.omega_m = map(mp.mpf, (phi, s0, m, omega_m))
        p = mp.mpf(10) ** (mp.mpf(snr_db) / 10)
        hd1 = friis(275e9, d_sr, 52, 52)
        ha1 = mp.exp(-0.5 * mp.mpf(kappa) * d_sr)
        hd2 = friis(8e9, d_rd, 52, 52)
        self.A = 1 / (p * hd1**2 * ha1**2 * self.omega**2 * self.s0**2)
        self.C = self.m / (p * hd2**2 * self.omega_m)

    def cdf_thz(self, lam):
        if lam <= 0:
            return mp.mpf(0)
        k = self.phi / self.alpha
        z = self.mu * (self.A * lam) ** (self.alpha / 2)
        return mp.gammainc(self.mu, 0, z, regularized=True) + z**k * mp.gammainc(self.mu - k, z) / mp.gamma(self.mu)

    def cdf_rf(self, lam):
        return mp.gammainc(self.m, 0, self.C * lam, regularized=True)

    def cdf(self, lam):
        f1, f2 = self.cdf_thz(lam), self.cdf_rf(lam)
        return f1 + f2 - f1 * f2

    def knees(self):
        return sorted([1 / self.A * self.mu ** (-2 / self.alpha), 1 / self.C])


MIDPOINT = dict(alpha=2.3, mu=2.25, omega=1.75, phi=6.75, s0=0.56, m=2.3, omega_m=1.5075)


def q(x):
    return mp.erfc(x / mp.sqrt(2)) / 2


def ser_rqam(mi, mq, beta):
    p, qq = 1 - mp.mpf(1) / mi, 1 - mp.mpf(1) / mq
    a = mp.sqrt(6 / ((mi**2 - 1) + (mq**2 - 1) * mp.mpf(beta) ** 2))
    b = beta * a if mq > 1 else mp.mpf(0)

    def f(l):
        qa, qb = q(a * mp.sqrt(l)), q(b * mp.sqrt(l))
        return 2 * p * qa + 2 * qq * qb - 4 * p * qq * qa * qb
    return f


def hqam_params(m):
    pts = []
    with open(os.path.join(ROOT, "data", "hqam", "hqam_%d.txt" % m)) as fh:
        for line in fh:
            line = line.strip()
            if line and not line.startswith("#"):
                re, im = map(float, line.split())
                pts.append(complex(re, im))
    dmin = min(abs(a - b) for a, b in itertools.combinations(pts, 2))
    near = lambda a, b: abs(abs(a - b) - dmin) <= 1e-9 * dmin
    pairs = sum(1 for a, b in itertools.combinations(pts, 2) if near(a, b))
    tri = sum(1 for a, b, c in itertools.combinations(pts, 3) if near(a, b) and near(b, c) and near(a, c))
    energy = sum(abs(p) ** 2 for p in pts) / len(pts) / dmin**2
    return 2.0 * pairs / m, 3.0 * tri / m, 1.0 / (2.0 * energy)


def ser_hqam(m):
    B, Bc, ah = map(mp.mpf, hqam_params(m))

    def f(l):
        return (B * q(mp.sqrt(ah * l)) + mp.mpf(2) / 3 * Bc * q(mp.sqrt(2 * ah * l / 3)) ** 2
                - 2 * Bc * q(mp.sqrt(ah * l)) * q(mp.sqrt(ah * l / 3)))
    return f


def ser_ncfsk(m):
    def f(l):
        return sum((-1) ** (e + 1) / mp.mpf(e + 1) * mp.binomial(m - 1, e) * mp.exp(-e * l / mp.mpf(e + 1))
                   for e in range(1, m))
    return f


def aser(model, ser):
    # Integration by parts of the CDF approach: int P(l) f(l) dl = -int P'(l) F(l) dl.
    dser = lambda l: mp.diff(ser, l)
    pts = [0] + model.knees() + [mp.inf]
    return mp.quad(lambda l: -dser(l) * model.cdf(l), pts)


def mgf(model, s):
    pts = [0] + [k for k in model.knees()] + [mp.inf]
    return s * mp.quad(lambda l: mp.exp(-s * l) * model.cdf(l), pts)


def meijer_g30_23(mu, k, x):
    return mp.meijerg([[], [1, k + 1]], [[mu, 0, k], []], x)


values = []


def put(name, v, note=""):
    values.append((name, mp.mpf(v), note))


# ------------------------------------------------------------------ specfun
for a, x in [(-3.375, 1e-3), (-0.5, 0.2), (-2.0, 0.5), (-1.3, 3.0), (-4.6, 20.0), (2.5, 0.7)]:
    tag = ("%g_%g" % (a, x)).replace("-", "m").replace(".", "p").replace("+", "")
    put("kGammaUpper_" + tag, mp.gammainc(a, x))
for z in [0.5, 2.0, 10.0, 30.0]:
    put("kHyp1f1_" + ("%g" % z).replace(".", "p"), mp.hyp1f1(1, 1.5, z))
for z in [0.3, 0.9, 0.99]:
    put("kHyp2f1_" + ("%g" % z).replace(".", "p"), mp.hyp2f1(1, 1, 1.5, z))
put("kMeijer30_a", meijer_g30_23(1.5, 2.0, 0.3), "G30_23, mu=1.5 k=2 x=0.3")
put("kMeijer30_b", meijer_g30_23(2.25, 6.75 / 2.3, 1.7), "G30_23, mu=2.25 k=6.75/2.3 x=1.7")
put("kMeijer30_c", meijer_g30_23(3.5, 6.875, 0.05), "G30_23, mu=3.5 k=6.875 x=0.05")
put("kMeijer11_12", mp.meijerg([[0.5], []], [[0], [-0.5]], 1), "G11_12 [1 | 1/2; 0,-1/2]")


# Building-block integrals with (alpha=2, mu=1, phi=2, A=1, C=1, m=1)
# mu = k = 1 puts a double pole into the G kernel, which mpmath's meijerg does
# not resolve; use its incomplete-gamma form (1 - F) Gamma(mu) / k instead.
def kernel_g(l):
    return mp.gammainc(1, l) - l * mp.gammainc(0, l)


put("kI2_ref", mp.quad(lambda l: l ** -0.5 * mp.exp(-l) * mp.gammainc(1, l) * kernel_g(l), [0, 1, 5, mp.inf]),
    "I2(-1/2, 1)")
put("kI4_ref", mp.quad(lambda l: mp.exp(-l) * mp.hyp1f1(1, 1.5, l / 2) * kernel_g(l) * mp.gammainc(1, l),
                       [0, 1, 5, mp.inf]), "I4(1, 1/2)")

# ------------------------------------------------------------------ channel
put("kFriisThzTable", friis(275e9, 300, 52, 52), "275 GHz, 300 m, 52 dBi each")
put("kFriisRfTable", friis(8e9, 800, 52, 52), "8 GHz, 800 m, 52 dBi each")


def alpha_mu_pdf(al, mu, om, x):
    return al * mu**mu * x ** (al * mu - 1) / (om ** (al * mu) * mp.gamma(mu)) * mp.exp(-mu * (x / om) ** al)


put("kAlphaMuCdf", mp.quad(lambda x: alpha_mu_pdf(1.6, 2.5, 1.5, x), [0, 1.2]), "alpha=1.6 mu=2.5 omega=1.5 x=1.2")


def composition(al, mu, om, phi, s0, x):
    fhf = lambda u: mp.gammainc(mu, 0, mu * (u / om) ** al, regularized=True)
    return mp.quad(lambda y: fhf(x / y) * phi * y ** (phi - 1) / s0**phi, [0, s0])


put("kCompositeA", composition(2, 1, 1, 4, 0.7, 0.5), "alpha=2 mu=1 omega=1 phi=4 s0=0.7 x=0.5")
put("kCompositeB", composition(1.6, 2.5, 1.5, 6, 0.5, 0.9), "alpha=1.6 mu=2.5 omega=1.5 phi=6 s0=0.5 x=0.9")
put("kNakagamiCdf", mp.quad(lambda x: 2 * 2.1**2.1 * x ** (2 * 2.1 - 1) / (mp.gamma(2.1) * 0.04**2.1)
                            * mp.exp(-2.1 * x**2 / 0.04), [0, 0.1]), "m=2.1 omega_m=0.04 x=0.1")

# ---------------------------------------------------------------- linkstats
mid30 = Model(snr_db=30, **MIDPOINT)
for lam in [0.05, 0.5, 2.0]:
    put("kCdfMid30_" + ("%g" % lam).replace(".", "p"), mid30.cdf(lam), "midpoint, 30 dB")
put("kCcdfMid30_5", (1 - mid30.cdf_thz(5.0)) * (1 - mid30.cdf_rf(5.0)), "midpoint, 30 dB")
for s in [0.1, 1.0, 10.0]:
    put("kMgfMid30_" + ("%g" % s).replace(".", "p"), mgf(mid30, s), "midpoint, 30 dB")

# --------------------------------------------------------------------- aser
for db in [20, 40]:
    mdl = Model(snr_db=db, **MIDPOINT)
    put("kAserQam4_%d" % db, aser(mdl, ser_rqam(2, 2, 1.0)), "midpoint")
    put("kAserRqam4x2_%d" % db, aser(mdl, ser_rqam(4, 2, 1.0)), "midpoint")
    put("kAserBpsk_%d" % db, aser(mdl, ser_rqam(2, 1, 1.0)), "midpoint")
    put("kAserHqam16_%d" % db, aser(mdl, ser_hqam(16)), "midpoint")
    put("kAserNcfsk4_%d" % db, aser(mdl, ser_ncfsk(4)), "midpoint")

with open(os.path.join(HERE, "frozen.hpp"), "w") as out:
    out.write("// Generated by tests/oracles/generate.py; do not edit.\n#pragma once\n\nnamespace frozen {\n\n")
    for name, v, note in values:
        if note:
            out.write("// %s\n" % note)
        out.write("inline constexpr double %s = %s;\n" % (name, mp.nstr(v, 17, min_fixed=1, max_fixed=0)))
    out.write("\n}  // namespace frozen\n")
print("wrote %d values" % len(values))
