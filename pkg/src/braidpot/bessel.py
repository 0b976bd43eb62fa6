"""Bessel J_n, modified Bessel I_n/K_n, derivatives, and series identities.

Scalar-order public API over the backend order-table primitives, plus the
addition-formula and identity checks that the energy modules rely on.
Checks are library functions so callers can assert them at runtime.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import backend

MAX_ORDER = 64


@dataclass(frozen=True)
class SeriesTolerance:
    """Truncation control for the infinite sums."""

    abs_tol: float = 1e-12
    max_terms: int = 64

    def __post_init__(self):
        if not self.abs_tol > 0.0:
            raise ValueError("abs_tol must be positive")
        if self.max_terms < 8:
            raise ValueError("max_terms must be at least 8")


def _check_order(n):
    n = int(n)
    if abs(n) > MAX_ORDER:
        raise ValueError(f"order |n|={abs(n)} exceeds the library cap {MAX_ORDER}")
    return n


def bessel_j(n, x):
    """J_n(x) for integer n, real x (scalar or array)."""
    n = _check_order(n)
    if np.any(np.abs(x) >= 1e6):
        raise OverflowError("bessel_j argument outside supported range")
    tab = backend.j_orders(x, abs(n))
    val = tab[..., abs(n)]
    if n < 0 and n % 2:
        val = -val
    return val


def bessel_i(n, x):
    """I_n(x) for integer n, x >= 0."""
    n = _check_order(n)
    return backend.i_orders(x, abs(n))[..., abs(n)]


def bessel_k(n, x):
    """K_n(x) for integer n, x > 0."""
    n = _check_order(n)
    return backend.k_orders(x, abs(n))[..., abs(n)]


def bessel_i_prime(n, x):
    """I_n'(x) = (I_{n-1}(x) + I_{n+1}(x)) / 2."""
    n = abs(_check_order(n))
    tab = backend.i_orders(x, n + 1)
    low = tab[..., abs(n - 1)]
    return 0.5 * (low + tab[..., n + 1])


def bessel_k_prime(n, x):
    """K_n'(x) = -(K_{n-1}(x) + K_{n+1}(x)) / 2."""
    n = abs(_check_order(n))
    tab = backend.k_orders(x, n + 1)
    return -0.5 * (tab[..., abs(n - 1)] + tab[..., n + 1])


def bessel_k_pp(n, x):
    """K_n''(x) from the modified Bessel ODE: (1 + n^2/x^2) K_n - K_n'/x."""
    n = abs(_check_order(n))
    x = np.asarray(x, dtype=float)
    return (1.0 + n * n / (x * x)) * bessel_k(n, x) - bessel_k_prime(n, x) / x


def bessel_j_prime(n, x):
    """J_n'(x) = (J_{n-1}(x) - J_{n+1}(x)) / 2."""
    n = _check_order(n)
    tab = backend.j_orders(x, abs(n) + 1)

    def j_of(order):
        v = tab[..., abs(order)]
        return -v if (order < 0 and order % 2) else v

    return 0.5 * (j_of(n - 1) - j_of(n + 1))


def wronskian_residual(n, x):
    """| I_n K_n' - I_n' K_n + 1/x | relative to the Wronskian value 1/x."""
    return x * abs(
        bessel_i(n, x) * bessel_k_prime(n, x)
        - bessel_i_prime(n, x) * bessel_k(n, x)
        + 1.0 / x
    )


def recurrence_residuals(n, x):
    """Relative residuals of the three-term recurrences for J, I and K.

    Each residual is normalised by the largest term entering the relation
    (the absolute residual of the K recurrence is meaningless at large
    order, where K_n itself is astronomically large).
    """
    n = abs(_check_order(n))
    if n < 1:
        raise ValueError("recurrence check needs n >= 1")
    jt = backend.j_orders(x, n + 1)
    it = backend.i_orders(x, n + 1)
    kt = backend.k_orders(x, n + 1)
    mid = (2.0 * n / x)
    rj = jt[..., n - 1] + jt[..., n + 1] - mid * jt[..., n]
    sj = max(abs(jt[..., n - 1]), abs(jt[..., n + 1]), abs(mid * jt[..., n]), 1e-300)
    ri = it[..., n - 1] - it[..., n + 1] - mid * it[..., n]
    si = max(abs(it[..., n - 1]), abs(it[..., n + 1]), abs(mid * it[..., n]), 1e-300)
    rk = kt[..., n + 1] - kt[..., n - 1] - mid * kt[..., n]
    sk = max(abs(kt[..., n + 1]), abs(kt[..., n - 1]), abs(mid * kt[..., n]), 1e-300)
    return abs(rj) / sj, abs(ri) / si, abs(rk) / sk


def _helix_reduced(eta2, xi2):
    """In-plane radius and continuous azimuth of a tilted ring direction."""
    rh = np.sqrt(np.cos(xi2) ** 2 + np.cos(eta2) ** 2 * np.sin(xi2) ** 2)
    # continuous branch of atan(cos(eta) tan(xi)), no jumps at xi = pi/2
    xt = xi2 + np.arctan2(
        (np.cos(eta2) - 1.0) * np.sin(xi2) * np.cos(xi2),
        np.cos(xi2) ** 2 + np.cos(eta2) * np.sin(xi2) ** 2,
    )
    return rh, xt


def graf_addition_check(aK, eta2, xi2, m, tol=None):
    """Residual of the tilted-ring addition formulas (J and I variants).

    Both sides are evaluated with the n-sum truncated per `tol`; the
    returned value is the larger of the two |LHS - RHS|.
    """
    tol = tol or SeriesTolerance()
    if aK <= 0.0:
        raise ValueError("aK must be positive")
    m = _check_order(m)
    rh, xt = _helix_reduced(eta2, xi2)
    nmax = min(tol.max_terms, MAX_ORDER - 1)

    x1 = aK * (1.0 + np.cos(eta2)) / 2.0
    x2 = aK * (1.0 - np.cos(eta2)) / 2.0

    lhs_j = bessel_j(m, aK * rh) * np.exp(-1j * m * xt)
    jt1 = backend.j_orders(x1, nmax + abs(m) + 1)
    jt2 = backend.j_orders(x2, nmax + abs(m) + 1)

    def jv(tab, order):
        v = tab[abs(order)]
        return -v if (order < 0 and order % 2) else v

    rhs_j = sum(
        jv(jt2, m - n) * jv(jt1, n) * np.exp(-2j * n * xi2) * np.exp(1j * m * xi2)
        for n in range(-nmax, nmax + 1)
    )
    res_j = abs(lhs_j - rhs_j)

    lhs_i = bessel_i(m, aK * rh) * np.exp(-1j * m * xt)
    it1 = backend.i_orders(x1, nmax + abs(m) + 1)
    it2 = backend.i_orders(x2, nmax + abs(m) + 1)
    rhs_i = sum(
        it2[abs(m - mp)] * it1[abs(mp)] * np.exp(-2j * mp * xi2) * np.exp(1j * m * xi2)
        for mp in range(-nmax, nmax + 1)
    )
    res_i = abs(lhs_i - rhs_i)

    res = max(res_j, res_i)
    if res > tol.abs_tol * 1e4 and res > 1e-6:
        raise ArithmeticError(f"addition formula did not converge: residual {res:g}")
    return res


def jacobi_anger_residual(z, t, jmax=40):
    """| exp(-i z sin t) - sum_{|j|<=jmax} J_j(z) exp(-i j t) |."""
    jt = backend.j_orders(z, jmax)

    def jv(order):
        v = jt[abs(order)]
        return -v if (order < 0 and order % 2) else v

    rhs = sum(jv(j) * np.exp(-1j * j * t) for j in range(-jmax, jmax + 1))
    return abs(np.exp(-1j * z * np.sin(t)) - rhs)
