# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled kernels: scalar Bessel order tables, the Yukawa pair sum and
the hot mode-sum reductions.  The pure-python backend in _kernels_py.py
implements the same contract; selection happens in backend.py.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, exp, log, fabs, M_PI

cnp.import_array()

BACKEND_NAME = "compiled"

cdef double EULER_GAMMA = 0.5772156649015329
cdef double RESCALE_THRESHOLD = 1e250


# ---------------------------------------------------------------------------
# scalar Bessel primitives
# ---------------------------------------------------------------------------

cdef void _series_small(double x, int nmax, double coef_sign, double* out) nogil:
    """Ascending series for I (coef_sign=+1) / J (-1), accurate for x <= 0.5."""
    cdef double half = x / 2.0
    cdef double q = coef_sign * half * half
    cdef double lead = 1.0, term, s
    cdef int n, k
    for n in range(nmax + 1):
        term = lead
        s = term
        for k in range(1, 12):
            term *= q / (k * (n + k))
            s += term
        out[n] = s
        lead *= half / (n + 1)


cdef int _down_recurrence(double x, int nmax, double coef_sign, int norm_kind,
                          double* out) except -1:
    """Miller downward recurrence shared by I (coef_sign=+1) and J (-1).

    norm_kind: 0 unit (J), 1 exp (I), 2 exp-scaled (e^{-x} I).  Arguments
    below 0.5 take the ascending series instead (the recurrence growth rate
    there would outrun the overflow rescaling).
    """
    cdef int k, kk, mstart
    cdef double hi, lo, nxt, norm, fac
    cdef bint norm_exp = norm_kind >= 1
    for k in range(nmax + 1):
        out[k] = 0.0
    out[0] = 1.0
    if x == 0.0:
        return 0
    if x <= 0.5:
        _series_small(x, nmax, coef_sign, out)
        if norm_kind == 2:
            fac = exp(-x)
            for k in range(nmax + 1):
                out[k] *= fac
        return 0
    if norm_kind != 2 and x > 690.0:
        raise OverflowError("Bessel argument beyond supported range")
    mstart = nmax + 16 + <int>(1.25 * x + 2.0 * sqrt(40.0 * (nmax + 2)) + 1.0)
    if mstart % 2:
        mstart += 1
    hi = 0.0
    lo = 1e-30
    norm = 2.0 * lo if (norm_exp or mstart % 2 == 0) else 0.0
    for k in range(mstart, 0, -1):
        nxt = coef_sign * hi + (2.0 * k / x) * lo
        hi = lo
        lo = nxt
        kk = k - 1
        if kk <= nmax:
            out[kk] = lo
        if norm_exp:
            norm += lo if kk == 0 else 2.0 * lo
        elif kk % 2 == 0:
            norm += lo if kk == 0 else 2.0 * lo
        if (k % 8) == 0 and fabs(lo) > RESCALE_THRESHOLD:
            fac = 1.0 / RESCALE_THRESHOLD
            hi *= fac
            lo *= fac
            norm *= fac
            for kk in range(nmax + 1):
                out[kk] *= fac
    if norm_kind == 1:
        fac = exp(x) / norm
    else:
        # norm_kind 2 divides by the e^x-sized norm directly -> e^{-x} I_n
        fac = 1.0 / norm
    for k in range(nmax + 1):
        out[k] *= fac
    return 0


cdef int _i_orders(double x, int nmax, double* out) except -1:
    return _down_recurrence(x, nmax, 1.0, 1, out)


cdef int _i_orders_scaled(double x, int nmax, double* out) except -1:
    return _down_recurrence(x, nmax, 1.0, 2, out)


cdef int _j_orders(double x, int nmax, double* out) except -1:
    cdef int k
    _down_recurrence(fabs(x), nmax, -1.0, 0, out)
    if x < 0.0:
        for k in range(1, nmax + 1, 2):
            out[k] = -out[k]
    return 0


cdef void _k0k1_series(double x, double* k0, double* k1):
    cdef double q = x * x / 4.0
    cdef double term = 1.0, i0 = 1.0, term1 = 0.5, i1 = 0.5
    cdef double hk = 0.0, s0 = 0.0
    cdef double psi1 = -EULER_GAMMA, psi2 = 1.0 - EULER_GAMMA
    cdef double s1 = psi1 + psi2, t1 = 1.0
    cdef int k
    for k in range(1, 30):
        term *= q / (k * k)
        i0 += term
        term1 *= q / (k * (k + 1))
        i1 += term1
        hk += 1.0 / k
        s0 += term * hk
        t1 *= q / (k * (k + 1))
        psi1 += 1.0 / k
        psi2 += 1.0 / (k + 1)
        s1 += t1 * (psi1 + psi2)
    i1 *= x
    cdef double lg = log(x / 2.0)
    k0[0] = -(lg + EULER_GAMMA) * i0 + s0
    k1[0] = lg * i1 + 1.0 / x - (x / 4.0) * s1


cdef void _k0k1_cf(double x, bint scaled, double* k0, double* k1):
    cdef double b = 2.0 * (1.0 + x)
    cdef double d = 1.0 / b
    cdef double h = d, delh = d
    cdef double q1 = 0.0, q2 = 1.0
    cdef double a1 = 0.25
    cdef double q = a1, c = a1, a = -a1
    cdef double s = 1.0 + q * delh
    cdef double qnew, dels
    cdef int i
    for i in range(2, 64):
        a -= 2.0 * (i - 1)
        c = -a * c / i
        qnew = (q1 - b * q2) / a
        q1 = q2
        q2 = qnew
        q += c * qnew
        b += 2.0
        d = 1.0 / (b + a * d)
        delh = (b * d - 1.0) * delh
        h += delh
        dels = q * delh
        s += dels
        if fabs(dels) < 1e-17 * fabs(s):
            break
    k0[0] = sqrt(M_PI / (2.0 * x)) / s
    if not scaled:
        k0[0] *= exp(-x)
    k1[0] = k0[0] * (x + 0.5 - a1 * h) / x


cdef int _k_orders(double x, int nmax, bint scaled, double* out) except -1:
    cdef double k0, k1
    cdef int n
    if x <= 0.0:
        raise ValueError("k_orders requires x > 0")
    if x <= 2.0:
        _k0k1_series(x, &k0, &k1)
        if scaled:
            k0 *= exp(x)
            k1 *= exp(x)
    else:
        _k0k1_cf(x, scaled, &k0, &k1)
    out[0] = k0
    if nmax >= 1:
        out[1] = k1
    for n in range(1, nmax):
        out[n + 1] = out[n - 1] + (2.0 * n / x) * out[n]
    if out[nmax] != out[nmax]:
        raise OverflowError("K_n overflow: order/argument outside supported range")
    return 0


def _orders_wrapper(x, int nmax, kind):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] xs
    cdef cnp.ndarray[cnp.float64_t, ndim=2] res
    cdef Py_ssize_t i
    arr = np.asarray(x, dtype=np.float64)
    scalar = arr.ndim == 0
    xs = np.atleast_1d(arr)
    res = np.empty((xs.shape[0], nmax + 1))
    for i in range(xs.shape[0]):
        if kind == 0:
            _i_orders(xs[i], nmax, &res[i, 0])
        elif kind == 1:
            _j_orders(xs[i], nmax, &res[i, 0])
        elif kind == 2:
            _k_orders(xs[i], nmax, 0, &res[i, 0])
        elif kind == 3:
            _i_orders_scaled(xs[i], nmax, &res[i, 0])
        else:
            _k_orders(xs[i], nmax, 1, &res[i, 0])
    return res[0] if scalar else res


def i_orders(x, int nmax):
    """I_0(x)..I_nmax(x) for x >= 0 (scalar or 1-D array)."""
    if np.any(np.asarray(x) < 0.0):
        raise ValueError("i_orders expects x >= 0; use order parity for x < 0")
    return _orders_wrapper(x, nmax, 0)


def j_orders(x, int nmax):
    """J_0(x)..J_nmax(x) for real x."""
    return _orders_wrapper(x, nmax, 1)


def k_orders(x, int nmax):
    """K_0(x)..K_nmax(x) for x > 0."""
    return _orders_wrapper(x, nmax, 2)


def i_orders_scaled(x, int nmax):
    """e^{-x} I_n(x) for orders 0..nmax; safe for arbitrarily large x."""
    if np.any(np.asarray(x) < 0.0):
        raise ValueError("i_orders_scaled expects x >= 0")
    return _orders_wrapper(x, nmax, 3)


def k_orders_scaled(x, int nmax):
    """e^{x} K_n(x) for orders 0..nmax; safe for arbitrarily large x."""
    return _orders_wrapper(x, nmax, 4)


# ---------------------------------------------------------------------------
# Yukawa pair sum
# ---------------------------------------------------------------------------

def yukawa_sum(double[:, ::1] pts1, double[::1] w1,
               double[:, ::1] pts2, double[::1] w2,
               double kappa, double rcut):
    """Sum_ij w1_i w2_j exp(-kappa r_ij)/r_ij with an r > rcut skip."""
    cdef Py_ssize_t i, j, n1 = pts1.shape[0], n2 = pts2.shape[0]
    cdef double dx, dy, dz, r2, r, total = 0.0, comp = 0.0, term, t
    cdef double rcut2 = rcut * rcut
    for i in range(n1):
        for j in range(n2):
            dx = pts1[i, 0] - pts2[j, 0]
            dy = pts1[i, 1] - pts2[j, 1]
            dz = pts1[i, 2] - pts2[j, 2]
            r2 = dx * dx + dy * dy + dz * dz
            if r2 > rcut2:
                continue
            if r2 < 1e-18:
                raise ValueError("overlapping charges in pair sum")
            r = sqrt(r2)
            term = w1[i] * w2[j] * exp(-kappa * r) / r
            # Kahan step
            t = total + term
            if fabs(total) >= fabs(term):
                comp += (total - t) + term
            else:
                comp += (term - t) + total
            total = t
    return total + comp


# ---------------------------------------------------------------------------
# mode-sum reductions
# ---------------------------------------------------------------------------

cdef inline double _jval(double[:, ::1] JT, int qi, int order) nogil:
    cdef int a = order if order >= 0 else -order
    cdef double v = JT[qi, a]
    if order < 0 and (a & 1):
        v = -v
    return v


def nocore_reduce(int ncap, int mcap, int jcap,
                  int[:, :, ::1] kidx,
                  double[:, ::1] I1m, double[:, ::1] I1p,
                  double[:, ::1] I2m, double[:, ::1] I2p,
                  double[:, ::1] KT,
                  double[:, ::1] J1T, double[:, ::1] J2T):
    """Six-index reduction of the no-core mode sum.

    Accumulates real coefficients C[p, q] of the phase exp(i(p xi1 + q xi2)),
    p = 2m - n - j and q = n' - 2m' - j', iterating n, n', m, m', j, j' in
    fixed order with Kahan compensation per coefficient.  Returns (C, bound)
    where bound is the summed magnitude of all boundary-shell terms.
    """
    cdef int P = 2 * mcap + ncap + jcap
    cdef cnp.ndarray[cnp.float64_t, ndim=2] C = np.zeros((2 * P + 1, 2 * P + 1))
    cdef cnp.ndarray[cnp.float64_t, ndim=2] comp = np.zeros((2 * P + 1, 2 * P + 1))
    cdef double[:, ::1] Cv = C
    cdef double[:, ::1] compv = comp
    cdef double bound = 0.0
    cdef int n, np_, m, mp_, j, jp_, u, p, q, qi, ko
    cdef double term, t, y
    cdef bint atcap
    for n in range(-ncap, ncap + 1):
        for np_ in range(-ncap, ncap + 1):
            u = n + np_
            ko = np_ - n if np_ >= n else n - np_
            for m in range(-mcap, mcap + 1):
                for mp_ in range(-mcap, mcap + 1):
                    for j in range(-jcap, jcap + 1):
                        p = 2 * m - n - j
                        for jp_ in range(-jcap, jcap + 1):
                            q = np_ - 2 * mp_ - jp_
                            qi = kidx[u + 2 * ncap, p + P, q + P]
                            term = KT[qi, ko]
                            term *= I1m[qi, abs(n - m)] * I1p[qi, abs(m)]
                            term *= I2m[qi, abs(np_ - mp_)] * I2p[qi, abs(mp_)]
                            term *= _jval(J1T, qi, j) * _jval(J2T, qi, jp_)
                            if np_ & 1:
                                term = -term
                            # Kahan-compensated accumulate into C[p, q]
                            y = term - compv[p + P, q + P]
                            t = Cv[p + P, q + P] + y
                            compv[p + P, q + P] = (t - Cv[p + P, q + P]) - y
                            Cv[p + P, q + P] = t
                            atcap = (abs(n) == ncap or abs(np_) == ncap or
                                     abs(m) == mcap or abs(mp_) == mcap or
                                     abs(j) == jcap or abs(jp_) == jcap)
                            if atcap:
                                bound += fabs(term)
    return C, bound


def dir_reduce(int ncap, int mcap, int lcap, int jwin,
               int[:, :, ::1] kidx,
               double[:, ::1] I1m, double[:, ::1] I1p,
               double[:, ::1] I2m, double[:, ::1] I2p,
               double[:, ::1] KT,
               double[:, ::1] J1T, double[:, ::1] J2T,
               double[:, ::1] Z1, double[:, ::1] Z1p,
               double[:, ::1] Z2, double[:, ::1] Z2p):
    """Six-index reduction of the direct dielectric-core mode sum.

    Returns C0, C1, C2 coefficient matrices over (l, l') for the
    zeta*zeta, zeta'*zeta*(n-n') and zeta*zeta'*(n-n') groupings, plus the
    boundary-shell magnitude.  jwin < 0 disables the Bessel-J order window.
    """
    cdef cnp.ndarray[cnp.float64_t, ndim=2] C0 = np.zeros((2 * lcap + 1, 2 * lcap + 1))
    cdef cnp.ndarray[cnp.float64_t, ndim=2] C1 = np.zeros((2 * lcap + 1, 2 * lcap + 1))
    cdef cnp.ndarray[cnp.float64_t, ndim=2] C2 = np.zeros((2 * lcap + 1, 2 * lcap + 1))
    cdef cnp.ndarray[cnp.float64_t, ndim=2] comp0 = np.zeros_like(C0)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] comp1 = np.zeros_like(C0)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] comp2 = np.zeros_like(C0)
    cdef double[:, ::1] C0v = C0, C1v = C1, C2v = C2
    cdef double[:, ::1] c0v = comp0, c1v = comp1, c2v = comp2
    cdef double bound = 0.0
    cdef int l, lp, n, np_, m, mp_, u, qi, ko, j1o, j2o, il, ilp
    cdef double base, term, t, y, w
    cdef bint atcap
    for l in range(-lcap, lcap + 1):
        il = l + lcap
        for lp in range(-lcap, lcap + 1):
            ilp = lp + lcap
            for n in range(-ncap, ncap + 1):
                for np_ in range(-ncap, ncap + 1):
                    u = n + np_
                    qi = kidx[il, ilp, u + 2 * ncap]
                    ko = np_ - n if np_ >= n else n - np_
                    for m in range(-mcap, mcap + 1):
                        j1o = 2 * m - n - l
                        if jwin >= 0 and (j1o > jwin or j1o < -jwin):
                            continue
                        for mp_ in range(-mcap, mcap + 1):
                            j2o = np_ - 2 * mp_ - lp
                            if jwin >= 0 and (j2o > jwin or j2o < -jwin):
                                continue
                            base = KT[qi, ko]
                            base *= I1m[qi, abs(n - m)] * I1p[qi, abs(m)]
                            base *= I2m[qi, abs(np_ - mp_)] * I2p[qi, abs(mp_)]
                            base *= _jval(J1T, qi, j1o) * _jval(J2T, qi, j2o)
                            if np_ & 1:
                                base = -base
                            term = base * Z1[qi, abs(l)] * Z2[qi, abs(lp)]
                            y = term - c0v[il, ilp]
                            t = C0v[il, ilp] + y
                            c0v[il, ilp] = (t - C0v[il, ilp]) - y
                            C0v[il, ilp] = t
                            atcap = (abs(n) == ncap or abs(np_) == ncap or
                                     abs(m) == mcap or abs(mp_) == mcap or
                                     abs(l) == lcap or abs(lp) == lcap)
                            if atcap:
                                bound += fabs(term)
                            w = base * (n - np_)
                            term = w * Z1p[qi, abs(l)] * Z2[qi, abs(lp)]
                            y = term - c1v[il, ilp]
                            t = C1v[il, ilp] + y
                            c1v[il, ilp] = (t - C1v[il, ilp]) - y
                            C1v[il, ilp] = t
                            term = w * Z1[qi, abs(l)] * Z2p[qi, abs(lp)]
                            y = term - c2v[il, ilp]
                            t = C2v[il, ilp] + y
                            c2v[il, ilp] = (t - C2v[il, ilp]) - y
                            C2v[il, ilp] = t
    return C0, C1, C2, bound
