"""Independent reference values for the C++ tests.

Run with `python3 tests/oracles/derive_oracles.py`; the output is pasted
verbatim into tests/oracle_values.hpp. Nothing here shares code with the
library: quadrature is mpmath, ODEs are scipy, statistics are scipy.stats.
"""

import itertools
import math

import mpmath as mp
import numpy as np
from scipy import integrate, stats

mp.mp.dps = 40


def emit(name, value):
    print(f"inline constexpr double {name} = {mp.nstr(mp.mpf(value), 20)};")


# Normal and chi-square quantiles.
emit("kAbsNormal95", stats.norm.ppf(0.975))
emit("kSupTwoIid95", stats.norm.ppf((1 + math.sqrt(0.95)) / 2))
emit("kChi2_399_lo", stats.chi2.ppf(0.005, 399))
emit("kChi2_399_hi", stats.chi2.ppf(0.995, 399))

# Taylor partial sum of e up to 1/6!.
emit("kExpTaylor6", mp.fsum(1 / mp.factorial(k) for k in range(7)))

# fred-smooth forcing: f(t) = x*(t) - 0.4 int_0^1 cos(t s) sin(x*(s)) ds, x* = cos(pi t / 2) + t.
def xstar(t):
    return mp.cos(mp.pi * t / 2) + t


for i, t in enumerate(["0", "0.25", "0.5", "0.75", "1"]):
    t = mp.mpf(t)
    f = xstar(t) - mp.mpf("0.4") * mp.quad(lambda s: mp.cos(t * s) * mp.sin(xstar(s)), [0, 1])
    emit(f"kFredSmoothForcing{i}", f)


# Exhaustive minimiser of Z over compositions of N into m parts, lexicographic ties.
def objective(q):
    z, prod = mp.mpf(0), mp.mpf(1)
    for v in reversed(q):
        prod *= v
        z += 1 / prod
    return z


def brute(N, m):
    best = None
    for cut in itertools.combinations(range(1, N), m - 1):
        bounds = (0,) + cut + (N,)
        q = tuple(bounds[i + 1] - bounds[i] for i in range(m))
        z = objective(q)
        if best is None or z < best[0]:
            best = (z, q)
    return best


for N, m in [(12, 2), (100, 2), (6, 3), (500, 3)]:
    z, q = brute(N, m)
    print(f"// brute({N},{m}) = {list(q)}")
    emit(f"kBruteZ_{N}_{m}", z)


# volt-smooth: X = f + 0.5 (cos(pi y/2) P + sin(pi y/2) Q) with
# P' = -P + int cos(pi v/2) sin X dv, Q' = -Q + int sin(pi v/2) sin X dv.

gx, gw = np.polynomial.legendre.leggauss(40)
v = 0.5 * (gx + 1)
w = 0.5 * gw


def forcing(tau, y):
    return np.cos(y) + tau * y / 2


def solution(tau, y, P, Q):
    return forcing(tau, y) + 0.5 * (np.cos(np.pi * y / 2) * P + np.sin(np.pi * y / 2) * Q)


def rhs(tau, state):
    P, Q = state
    s = np.sin(solution(tau, v, P, Q))
    return [-P + np.dot(w, np.cos(np.pi * v / 2) * s), -Q + np.dot(w, np.sin(np.pi * v / 2) * s)]


taus = [0.25, 0.5, 1.0]
sol = integrate.solve_ivp(rhs, (0, 1), [0.0, 0.0], method="DOP853", rtol=1e-13, atol=1e-15,
                          t_eval=taus, dense_output=False)
ys = [0.0, 0.5, 1.0]
for a, tau in enumerate(taus):
    for b, y in enumerate(ys):
        x = solution(tau, y, sol.y[0][a], sol.y[1][a])
        print(f"inline constexpr double kVoltSmooth_t{a}_y{b} = {float(x)!r};  // tau={tau}, y={y}")
