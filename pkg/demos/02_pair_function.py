"""The pair function D behind the kernel, summed pair by pair and by slope
index with the Dirichlet kernel, and its concentration on spacetime lines.

Run:  python3 demos/02_pair_function.py
"""
import math

import numpy as np
from scipy.integrate import trapezoid

from carpetlab.boxmodel import BoxConfig
from carpetlab.propagator import (d_index_pairs, d_pair_sum_truncated,
                                  d_resummed_truncated, kernel_d_arguments)

box = BoxConfig()
rng = np.random.default_rng(7)

print(f"truncation K = 24 covers {len(d_index_pairs(24))} index pairs")
x1, x2 = 0.3, 0.55
for sign, eta, zeta in kernel_d_arguments(x1, x2, box):
    xi, tau = rng.uniform(0, 1, 2)
    a = d_pair_sum_truncated(eta, zeta, xi, tau, 24)
    b = d_resummed_truncated(eta, zeta, xi, tau, 24)
    print(f"sign {sign:+d}  eta {eta:+.3f}  zeta {zeta:+.3f}  |pair - resummed| = {abs(a - b):.1e}")

# Many pairs share m' + m'' = n and therefore one slope; the resummed form
# groups them.  As the inner truncation grows, each group sharpens into a
# comb of delta lines in zeta.
eta, xi, tau, sigma, z0 = 0.3, 0.41, 0.137, 0.05, -0.2
zeta = np.linspace(z0 - 0.6, z0 + 0.6, 24001)
g = np.exp(-((zeta - z0) / sigma) ** 2) / (sigma * math.sqrt(math.pi))
n = 3
comb = sum((-1) ** (n * l) * np.exp(1j * math.pi * n * eta)
           * math.exp(-((l - xi + 2 * n * tau - z0) / sigma) ** 2) / (sigma * math.sqrt(math.pi))
           for l in range(-6, 7))
for K in (5, 20, 80, 400):
    d = d_resummed_truncated(eta, zeta, xi, tau, (6, K), n=n)
    print(f"inner K = {K:3d}: smoothed D minus delta comb = {abs(trapezoid(d * g, zeta) - comb):.2e}")
