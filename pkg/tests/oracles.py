"""Independent reference computations in plain Python and mpmath."""
from __future__ import annotations

import cmath
import itertools
import math

import mpmath


def naive_theta(z, T, radius=30):
    """Box sum of exp(pi i (k^t T k + 2 k^t z)) for |k_i| <= radius."""
    n = len(z)
    total = 0j
    for k in itertools.product(range(-radius, radius + 1), repeat=n):
        quad = sum(k[a] * T[a][b] * k[b] for a in range(n) for b in range(n))
        lin = sum(k[a] * z[a] for a in range(n))
        total += cmath.exp(1j * math.pi * (quad + 2 * lin))
    return total


def jacobi_theta(z, tau, dps=30):
    """theta_3 in the nome convention: theta(z, tau) = jtheta(3, pi z, exp(pi i tau))."""
    with mpmath.workdps(dps):
        q = mpmath.exp(1j * mpmath.pi * mpmath.mpc(tau))
        return complex(mpmath.jtheta(3, mpmath.pi * mpmath.mpc(z), q))


def naive_invariant_theta_1d(x1, x2, tau, radius=12):
    """n = 1 sum of exp(-pi |k1 tau + k2|^2 / y + 2 pi i (k1 x2 - k2 x1))."""
    y = tau.imag
    total = 0j
    for k1 in range(-radius, radius + 1):
        for k2 in range(-radius, radius + 1):
            h = abs(k1 * tau + k2) ** 2 / y
            total += cmath.exp(-math.pi * h + 2j * math.pi * (k1 * x2 - k2 * x1))
    return total


THETA_0_I = float(mpmath.pi ** 0.25 / mpmath.gamma(0.75))
