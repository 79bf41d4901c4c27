"""Cylindrical and spherical Bessel functions of integer order, real argument.

Everything here is written from scratch on top of numpy so the DtN mode
coefficients do not depend on a particular scipy build.  Functions take a
scalar or an array for ``x`` and return the same shape.

Evaluation strategy:

* J_n, j_n: power series when the terms are monotone (small x), otherwise
  Miller's downward recurrence normalised by a sum rule.
* Y_n, y_n: Y_0, Y_1 from ascending series (x <= 2) or Neumann series built
  from the Miller table, then upward recurrence, which is the stable
  direction for the second kind.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

EULER_GAMMA = 0.57721566490153286061
_RESCALE = 1e200
_SERIES_X = 2.0


def _prep(x, allow_zero=True):
    arr = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(arr)):
        raise ValueError("Bessel argument must be finite")
    if allow_zero:
        if np.any(arr < 0):
            raise ValueError("Bessel argument must be >= 0")
    elif np.any(arr <= 0):
        raise ValueError("second-kind Bessel functions need x > 0")
    return arr


def _out(arr, like):
    if np.ndim(like) == 0:
        return float(arr)
    return arr


def _check_order(n):
    if int(n) != n or n < 0:
        raise ValueError(f"order must be a non-negative integer, got {n!r}")
    return int(n)


def _finite_or_raise(arr, what):
    if not np.all(np.isfinite(arr)):
        raise OverflowError(f"{what} overflows for the requested order/argument")
    return arr


# --------------------------------------------------------------------------
# cylindrical, first kind
# --------------------------------------------------------------------------

def _jn_series(n, x):
    """Ascending series; only used where the terms decrease monotonically."""
    half = 0.5 * x
    term = np.power(half, n) / math.factorial(n)
    total = term.copy()
    q = -half * half
    for k in range(1, 200):
        term = term * q / (k * (k + n))
        total = total + term
        if np.all(np.abs(term) <= 1e-17 * np.abs(total)):
            break
    return total


def _miller_start(nmax, xmax):
    m = max(nmax, int(xmax)) + 20 + int(math.sqrt(40.0 * max(nmax, xmax, 1.0)))
    return m + (m % 2)


def _cyl_miller(nmax, x):
    """Downward recurrence for J_0..J_nmax at x > 0 (array).

    Also accumulates the Neumann sums needed for Y_0 and Y_1.
    Returns (table[nmax+1, len(x)], s_y0, s_y1) already normalised.
    """
    top = _miller_start(nmax, float(np.max(x)))
    table = np.zeros((nmax + 1, x.size))
    j_next = np.zeros_like(x)
    j_cur = np.full_like(x, 1e-30)
    norm = np.zeros_like(x)
    s_y0 = np.zeros_like(x)
    s_y1 = np.zeros_like(x)
    # s_y1 needs J_{2k-1} - J_{2k+1}; keep the odd value above the current even one
    for k in range(top, 0, -1):
        j_prev = (2.0 * k / x) * j_cur - j_next
        # j_prev is J_{k-1}; j_cur is J_k; j_next is J_{k+1}
        if k <= nmax:
            table[k] = j_cur
        if k % 2 == 0:
            m = k // 2
            sign = 1.0 if m % 2 == 0 else -1.0
            norm += 2.0 * j_cur
            s_y0 += sign * j_cur / m
            s_y1 += sign * (j_prev - j_next) / m
        j_next, j_cur = j_cur, j_prev
        big = np.abs(j_cur) > _RESCALE
        if np.any(big):
            scale = np.where(big, 1.0 / _RESCALE, 1.0)
            j_cur = j_cur * scale
            j_next = j_next * scale
            norm = norm * scale
            s_y0 = s_y0 * scale
            s_y1 = s_y1 * scale
            table = table * scale
    table[0] = j_cur
    norm += j_cur
    return table / norm, s_y0 / norm, s_y1 / norm


def bessel_j(n, x):
    """Cylindrical Bessel function of the first kind J_n(x), x >= 0."""
    n = _check_order(n)
    arr = _prep(x)
    flat = np.atleast_1d(arr).ravel()
    res = np.empty_like(flat)
    use_series = (flat <= _SERIES_X) | (0.25 * flat * flat <= n + 1)
    if np.any(use_series):
        res[use_series] = _jn_series(n, flat[use_series])
    rest = ~use_series
    if np.any(rest):
        table, _, _ = _cyl_miller(n, flat[rest])
        res[rest] = table[n]
    return _out(res.reshape(np.shape(arr)), x)


def _y01(x):
    """Y_0 and Y_1 for x > 0 (1-d array)."""
    y0 = np.empty_like(x)
    y1 = np.empty_like(x)
    small = x <= _SERIES_X
    if np.any(small):
        xs = x[small]
        half = 0.5 * xs
        lg = np.log(half)
        j0 = _jn_series(0, xs)
        j1 = _jn_series(1, xs)
        # A&S 9.1.13 (Y0) and 9.1.11 with n = 1 (Y1)
        q = half * half
        term = np.ones_like(xs)
        harm = 0.0
        s0 = np.zeros_like(xs)
        t1 = half.copy()
        s1 = (2.0 * (-EULER_GAMMA) + 1.0) * t1
        harm1 = 1.0
        for k in range(1, 60):
            term = term * (-q) / (k * k)
            harm += 1.0 / k
            s0 = s0 - term * harm
            t1 = t1 * (-q) / (k * (k + 1))
            harm_next = harm1 + 1.0 / (k + 1)
            s1 = s1 + (2.0 * (-EULER_GAMMA) + harm + harm_next) * t1
            harm1 = harm_next
            if np.all(np.abs(term) < 1e-18) and np.all(np.abs(t1) < 1e-18):
                break
        y0[small] = (2.0 / np.pi) * ((lg + EULER_GAMMA) * j0 + s0)
        y1[small] = -2.0 / (np.pi * xs) + (2.0 / np.pi) * lg * j1 - s1 / np.pi
    rest = ~small
    if np.any(rest):
        xr = x[rest]
        table, s_y0, s_y1 = _cyl_miller(1, xr)
        j0, j1 = table[0], table[1]
        lg = np.log(0.5 * xr) + EULER_GAMMA
        y0[rest] = (2.0 / np.pi) * lg * j0 - (4.0 / np.pi) * s_y0
        # Y1 = -d/dx Y0, differentiated term by term
        y1[rest] = -(2.0 / np.pi) * (j0 / xr - lg * j1) + (2.0 / np.pi) * s_y1
    return y0, y1


def bessel_y(n, x):
    """Cylindrical Bessel function of the second kind Y_n(x), x > 0."""
    n = _check_order(n)
    arr = _prep(x, allow_zero=False)
    flat = np.atleast_1d(arr).ravel()
    y_prev, y_cur = _y01(flat)
    if n == 0:
        res = y_prev
    else:
        with np.errstate(over="ignore", invalid="ignore"):
            for k in range(1, n):
                y_prev, y_cur = y_cur, (2.0 * k / flat) * y_cur - y_prev
        res = y_cur
    _finite_or_raise(res, f"Y_{n}")
    return _out(res.reshape(np.shape(arr)), x)


def bessel_j_prime(n, x):
    n = _check_order(n)
    if n == 0:
        return _neg(bessel_j(1, x))
    return 0.5 * (_sub(bessel_j(n - 1, x), bessel_j(n + 1, x)))


def bessel_y_prime(n, x):
    n = _check_order(n)
    if n == 0:
        return _neg(bessel_y(1, x))
    return 0.5 * (_sub(bessel_y(n - 1, x), bessel_y(n + 1, x)))


def _neg(v):
    return -v


def _sub(a, b):
    return a - b


# --------------------------------------------------------------------------
# spherical
# --------------------------------------------------------------------------

def _double_factorial_odd(n):
    out = 1.0
    for k in range(3, 2 * n + 2, 2):
        out *= k
    return out


def _sph_j_series(n, x):
    q = -0.5 * x * x
    term = np.power(x, n) / _double_factorial_odd(n)
    total = term.copy()
    for k in range(1, 200):
        term = term * q / (k * (2 * n + 2 * k + 1))
        total = total + term
        if np.all(np.abs(term) <= 1e-17 * np.abs(total)):
            break
    return total


def _sph_miller(nmax, x):
    """j_0..j_nmax by downward recurrence, x > 0 (1-d array)."""
    top = _miller_start(nmax, float(np.max(x)))
    table = np.zeros((nmax + 1, x.size))
    j_next = np.zeros_like(x)
    j_cur = np.full_like(x, 1e-30)
    for k in range(top, 0, -1):
        j_prev = ((2 * k + 1) / x) * j_cur - j_next
        if k <= nmax:
            table[k] = j_cur
        j_next, j_cur = j_cur, j_prev
        big = np.abs(j_cur) > _RESCALE
        if np.any(big):
            scale = np.where(big, 1.0 / _RESCALE, 1.0)
            j_cur = j_cur * scale
            j_next = j_next * scale
            table = table * scale
    table[0] = j_cur
    # j_next now holds the unnormalised j_1 of the recurrence
    true0 = np.sin(x) / x
    true1 = np.sin(x) / (x * x) - np.cos(x) / x
    use0 = np.abs(true0) >= np.abs(true1)
    scale = np.where(use0, true0 / np.where(use0, j_cur, 1.0),
                     true1 / np.where(use0, 1.0, j_next))
    return table * scale


def sph_bessel_j(n, x):
    """Spherical Bessel function j_n(x), x >= 0 (j_0(0) = 1)."""
    n = _check_order(n)
    arr = _prep(x)
    flat = np.atleast_1d(arr).ravel()
    res = np.empty_like(flat)
    use_series = (flat <= 1.0) | (0.5 * flat * flat <= 2 * n + 3)
    if np.any(use_series):
        res[use_series] = _sph_j_series(n, flat[use_series])
    rest = ~use_series
    if np.any(rest):
        res[rest] = _sph_miller(n, flat[rest])[n]
    return _out(res.reshape(np.shape(arr)), x)


def sph_bessel_y(n, x):
    """Spherical Bessel function y_n(x), x > 0."""
    n = _check_order(n)
    arr = _prep(x, allow_zero=False)
    flat = np.atleast_1d(arr).ravel()
    c, s = np.cos(flat), np.sin(flat)
    y_prev = -c / flat
    if n == 0:
        res = y_prev
    else:
        y_cur = -c / (flat * flat) - s / flat
        with np.errstate(over="ignore", invalid="ignore"):
            for k in range(1, n):
                y_prev, y_cur = y_cur, ((2 * k + 1) / flat) * y_cur - y_prev
        res = y_cur
    _finite_or_raise(res, f"y_{n}")
    return _out(res.reshape(np.shape(arr)), x)


def sph_bessel_j_prime(n, x):
    n = _check_order(n)
    if n == 0:
        return -sph_bessel_j(1, x)
    # avoids the 1/x of the other form, so it is fine at x = 0
    return (n * sph_bessel_j(n - 1, x) - (n + 1) * sph_bessel_j(n + 1, x)) / (2 * n + 1)


def sph_bessel_y_prime(n, x):
    n = _check_order(n)
    if n == 0:
        return -sph_bessel_y(1, x)
    return (n * sph_bessel_y(n - 1, x) - (n + 1) * sph_bessel_y(n + 1, x)) / (2 * n + 1)


# --------------------------------------------------------------------------
# evaluation records and identities
# --------------------------------------------------------------------------

_KINDS = {
    "J": (bessel_j, bessel_j_prime),
    "Y": (bessel_y, bessel_y_prime),
    "j": (sph_bessel_j, sph_bessel_j_prime),
    "y": (sph_bessel_y, sph_bessel_y_prime),
}


@dataclass(frozen=True)
class BesselEval:
    kind: str
    n: int
    x: float
    value: float
    derivative: float


def evaluate(kind: str, n: int, x: float) -> BesselEval:
    """Value and derivative of one Bessel function; kind in {J, Y, j, y}."""
    f, fp = _KINDS[kind]
    return BesselEval(kind, n, float(x), float(f(n, x)), float(fp(n, x)))


def cylindrical_wronskian(n, x):
    """J_n Y_n' - J_n' Y_n; equals 2/(pi x)."""
    return bessel_j(n, x) * bessel_y_prime(n, x) - bessel_j_prime(n, x) * bessel_y(n, x)


def spherical_wronskian(n, x):
    """j_n y_n' - j_n' y_n; equals 1/x^2."""
    return sph_bessel_j(n, x) * sph_bessel_y_prime(n, x) - sph_bessel_j_prime(n, x) * sph_bessel_y(n, x)


def bisect_root(func, lo, hi, tol=1e-15, maxiter=200):
    """Plain bisection; func(lo) and func(hi) must differ in sign."""
    flo = func(lo)
    fhi = func(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if np.sign(flo) == np.sign(fhi):
        raise ValueError("root not bracketed")
    for _ in range(maxiter):
        mid = 0.5 * (lo + hi)
        fm = func(mid)
        if fm == 0.0 or hi - lo < tol * max(1.0, abs(mid)):
            return mid
        if np.sign(fm) == np.sign(flo):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


# --------------------------------------------------------------------------
# plane wave on a circle / sphere
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class SurfaceIntegral:
    """Closed-form surface integral split into a real magnitude and a phase.

    ``value * phase`` is the complex integral.
    """

    dim: int
    moment: int
    value: float
    phase: complex

    @property
    def complex_value(self) -> complex:
        return self.value * self.phase


def surface_measure(dim: int, R: float) -> float:
    """|dB_R|: circumference (d = 2) or sphere area (d = 3)."""
    if dim == 2:
        return 2.0 * math.pi * R
    if dim == 3:
        return 4.0 * math.pi * R * R
    raise ValueError(f"dim must be 2 or 3, got {dim}")


def plane_wave_surface_integral(dim: int, kR: float, moment: int, R: float = 1.0) -> SurfaceIntegral:
    """Integral of (k_hat . r)^moment exp(-i k . r) over the circle/sphere r = R.

    moment 0: 2 pi R J0(kR)        | 4 pi R^2 j0(kR)
    moment 1: -2 pi i R^2 J1(kR)   | -4 pi i R^3 j1(kR)
    """
    if kR < 0 or R <= 0:
        raise ValueError("need kR >= 0 and R > 0")
    if moment not in (0, 1):
        raise ValueError("moment must be 0 or 1")
    if dim == 2:
        if moment == 0:
            return SurfaceIntegral(2, 0, 2.0 * math.pi * R * bessel_j(0, kR), 1.0 + 0j)
        return SurfaceIntegral(2, 1, 2.0 * math.pi * R * R * bessel_j(1, kR), -1j)
    if dim == 3:
        if moment == 0:
            return SurfaceIntegral(3, 0, 4.0 * math.pi * R * R * sph_bessel_j(0, kR), 1.0 + 0j)
        return SurfaceIntegral(3, 1, 4.0 * math.pi * R ** 3 * sph_bessel_j(1, kR), -1j)
    raise ValueError(f"dim must be 2 or 3, got {dim}")


def direction_moment(dim: int, R: float, power: int) -> float:
    """Integral of (k_hat . r_hat)^power over r = R for power 1 or 2."""
    if power == 1:
        return 0.0
    if power == 2:
        return surface_measure(dim, R) / dim
    raise ValueError("power must be 1 or 2")
