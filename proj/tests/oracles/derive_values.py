# Copyright 2026 The weighted-kelly Authors
# SPDX-License-Identifier: Apache-2.0
"""Independent derivation of the frozen expected values used in the C++ tests.

Uses mpmath at 50 digits with brute-force enumeration (itertools.product) and
adaptive quadrature, so no code path is shared with the library.
Run: python3 tests/oracles/derive_values.py
"""
import itertools
import mpmath as mp

mp.mp.dps = 50


def alpha_uniform(p, phi):
    m = len(p)
    return mp.fsum(f * q * mp.log(q * m) for q, f in zip(p, phi))


def expected_rate_bruteforce(p, E, phi, D, n):
    total = mp.mpf(0)
    for seq in itertools.product(range(len(p)), repeat=n):
        prob = mp.mpf(1)
        s = mp.mpf(0)
        z = mp.mpf(1)
        for i in seq:
            prob *= p[i]
            znew = z * (1 + D * E[i])
            s += phi[i] * mp.log(znew / z)
            z = znew
        total += prob * s
    return total


def show(name, value):
    print(f"{name:48s} {mp.nstr(value, 20)}")


binary_p = [mp.mpf("0.6"), mp.mpf("0.4")]
binary_E = [1, -1]
ones = [1, 1]
a_bin = alpha_uniform(binary_p, ones)
show("alpha binary p=(0.6,0.4)", a_bin)
show("alpha m=3 p=(0.4,0.3,0.3)", alpha_uniform([mp.mpf("0.4"), mp.mpf("0.3"), mp.mpf("0.3")], [1, 1, 1]))
show("ln 1.2", mp.log(mp.mpf("1.2")))
show("2 ln 0.8", 2 * mp.log(mp.mpf("0.8")))
show("ln 0.96", mp.log(mp.mpf("0.96")))
show("2 ln1.2 - 2 alpha", 2 * mp.log(mp.mpf("1.2")) - 2 * a_bin)
show("E[S_5] D=0.2 brute force", expected_rate_bruteforce(binary_p, binary_E, ones, mp.mpf("0.2"), 5))
show("5 alpha", 5 * a_bin)
show("E[S_5] D=0.5 brute force", expected_rate_bruteforce(binary_p, binary_E, ones, mp.mpf("0.5"), 5))
show("E[S_10] D=0.5 brute force", expected_rate_bruteforce(binary_p, binary_E, ones, mp.mpf("0.5"), 10))
show("drift D=0.5", mp.mpf("0.6") * mp.log(1.5) + mp.mpf("0.4") * mp.log(0.5) - a_bin)
show("drift D=0.4", mp.mpf("0.6") * mp.log(mp.mpf("1.4")) + mp.mpf("0.4") * mp.log(mp.mpf("0.6")) - a_bin)

# weighted binary markets
show("E=(1,-2) phi=(2,1) p=(0.7,0.3) alpha", alpha_uniform([mp.mpf("0.7"), mp.mpf("0.3")], [2, 1]))

# Gaussian closed forms vs adaptive quadrature
def npdf(x, var):
    return mp.exp(-x * x / (2 * var)) / mp.sqrt(2 * mp.pi * var)

kl = mp.quad(lambda x: npdf(x, 1) * mp.log(npdf(x, 1) / npdf(x, 2)), [-mp.inf, 0, mp.inf])
show("KL N(0,1)||N(0,2) quadrature", kl)
show("1/2 (ln 2 - 1/2)", (mp.log(2) - mp.mpf("0.5")) / 2)
half = mp.quad(lambda x: npdf(x, 1) * mp.log(npdf(x, 1) / npdf(x, 2)), [0, mp.inf])
show("indicator(x>0) alpha", half)
show("d=2 isotropic alpha", (1 - 2 + 2 * mp.log(2)) / 2)
g0 = 2 * (mp.sqrt(2) - 1)
show("g(0) for Sigma=1 Sigma0=2 D=0.5", g0)
for x in (-3, 0, 3):
    show(f"1 + 0.5 g({x})", mp.sqrt(2) * mp.exp(-mp.mpf(x) ** 2 / 4))
product_kernel = mp.quad(lambda x: 2 * (mp.sqrt(2) * mp.exp(-x * x / 4) - 1) * mp.exp(-x * x * (1 + mp.mpf(1) / 2) / 2), [-mp.inf, mp.inf])
show("product-kernel orthogonality residual (phi=1, martingale g)", product_kernel)
direct = mp.quad(lambda x: npdf(x, 2) * 2 * (mp.sqrt(2) * mp.exp(-x * x / 4) - 1), [-mp.inf, mp.inf])
show("direct orthogonality residual (phi=1, martingale g)", direct)
