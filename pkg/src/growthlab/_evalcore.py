"""Circle-evaluation engine for truncated power series.

Everything a growth functional needs from a series f(z) = sum a_n z^n on a
circle |z| = r is computed from per-coefficient log-magnitudes rescaled by
the maximum term mu(r) = max |a_n| r^n:

    f(r e^{i theta}) / mu(r) = sum t_n e^{i n theta},   |t_n| <= 1,

so the working numbers stay inside ordinary float range no matter how
violently the function grows.  What fixed-precision arithmetic cannot do is
resolve cancellation much deeper than its significand: the sum above can be
as small as e^{-2r} relative to mu(r) (e.g. e^z at theta = pi), which no
double can see at r = 100.  Three precision levels are therefore provided:

  'd'   plain complex128, noise floor ~3e-16 * N * mu(r)
  'dd'  vectorized double-double, floor ~1e-31 * N * mu(r)
  'mp'  band-limited mpmath Horner at a requested dps

Every evaluation returns an explicit noise floor (in log scale) so callers
can tell whether deep cancellation corrupted the values they care about, and
escalate.  Phases of coefficients that are exact multiples of pi/2 are
propagated exactly; everything else is honestly accounted for in the
coefficient-data error bound carried by CoeffData.rel_err_ln.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import mpmath as mp
import numpy as np

from . import _dd

__all__ = ["CoeffData", "EvalResult", "log_max_term", "eval_circle",
           "eval_points", "dps_for_floor", "LEVELS"]

LEVELS = ("d", "dd", "mp")

_EPS_LN = {"d": math.log(3e-16), "dd": math.log(2e-31)}

# band cutoffs: terms this far (in nats) below the max term cannot move the
# result above the level's noise floor
_BAND_CUT = {"d": 60.0, "dd": 130.0}


@dataclass
class CoeffData:
    """Log-polar coefficient storage for one truncated power series.

    lh/ll: double-double split of ln|a_n| (ll may be zeros), -inf for a_n=0.
    ph:    phase of a_n; the sentinel values 0, +-pi/2, +-pi (stored as the
           numpy constants) are treated as exact.
    rel_err_ln: ln of the relative error bound on the stored coefficients.
    mp_factory: optional callable dps -> (logs, phases) regenerating the
           coefficient data at arbitrary precision (mpmath lists).
    """

    lh: np.ndarray
    ll: np.ndarray
    ph: np.ndarray
    rel_err_ln: float
    mp_factory: Optional[Callable[[int], tuple]] = None
    _mp_cache: dict = field(default_factory=dict, repr=False)
    _a_cache: dict = field(default_factory=dict, repr=False)

    @property
    def n_terms(self) -> int:
        return len(self.lh)

    def mp_logs(self, dps: int):
        """(logs, phases) as mpmath lists at >= dps precision."""
        for d in sorted(self._mp_cache):
            if d >= dps:
                return self._mp_cache[d]
        if self.mp_factory is not None:
            pair = self.mp_factory(dps)
        else:
            with mp.workdps(dps + 10):
                logs = [mp.mpf(h) + mp.mpf(l) for h, l in zip(self.lh, self.ll)]
                phases = [mp.mpf(p) for p in self.ph]
            pair = (logs, phases)
        self._mp_cache[dps] = pair
        return pair

    def data_floor_ln(self, dps: Optional[int] = None) -> float:
        """Best achievable relative accuracy of the stored coefficients."""
        if dps is not None and self.mp_factory is not None:
            return -0.95 * dps * math.log(10)
        return self.rel_err_ln


@dataclass
class EvalResult:
    """ln|f| and arg f at the sampled angles, plus the noise floor.

    Values with logabs <= floor_ln are numerically indistinguishable from
    zero at the level used; their phases are meaningless.
    """

    logabs: np.ndarray
    phase: np.ndarray
    floor_ln: float
    log_mu: float
    level: str


def log_max_term(coeff: CoeffData, log_r: float):
    """(ln mu(r), nu(r)): max of ln|a_n| + n ln r and the LARGEST argmax."""
    n = np.arange(coeff.n_terms, dtype=float)
    x = coeff.lh + n * log_r
    if not np.any(np.isfinite(x)):
        raise ValueError("all coefficients vanish")
    m = np.nanmax(x[np.isfinite(x)])
    winners = np.nonzero(x == m)[0]
    return float(m), int(winners[-1])


def _band(coeff: CoeffData, log_r: float, cut: float):
    n = np.arange(coeff.n_terms, dtype=float)
    x = coeff.lh + n * log_r
    finite = np.isfinite(x)
    m = np.max(x[finite])
    keep = finite & (x >= m - cut)
    idx = np.nonzero(keep)[0]
    return int(idx[0]), int(idx[-1]) + 1, float(m)


_EXACT_CIS = {
    0.0: (1.0, 0.0),
    float(np.pi): (-1.0, 0.0),
    float(-np.pi): (-1.0, 0.0),
    float(np.pi / 2): (0.0, 1.0),
    float(-np.pi / 2): (0.0, -1.0),
}


def _coeff_cis(ph: np.ndarray):
    """cos/sin of coefficient phases, exact on the pi/2 grid."""
    cr = np.cos(ph)
    ci = np.sin(ph)
    for val, (c, s) in _EXACT_CIS.items():
        mask = ph == val
        if np.any(mask):
            cr[mask] = c
            ci[mask] = s
    return cr, ci


def _terms_d(coeff: CoeffData, log_r: float):
    """Rescaled coefficients t_n = a_n r^n / mu(r) as complex128 on a band."""
    lo, hi, log_mu = _band(coeff, log_r, _BAND_CUT["d"])
    n = np.arange(lo, hi, dtype=float)
    ldiff = coeff.lh[lo:hi] + n * log_r - log_mu
    with np.errstate(under="ignore"):
        mag = np.exp(ldiff)
    cr, ci = _coeff_cis(coeff.ph[lo:hi])
    return lo, hi, log_mu, (mag * cr) + 1j * (mag * ci)


def _terms_dd(coeff: CoeffData, log_r: float):
    lo, hi, log_mu = _band(coeff, log_r, _BAND_CUT["dd"])
    n = np.arange(lo, hi, dtype=float)
    # vanished coefficients inside the band are computed at a finite
    # sentinel and forced to exact zero afterwards (keeps dd kernels NaN-free)
    gone = ~np.isfinite(coeff.lh[lo:hi])
    lh = np.where(gone, log_mu, coeff.lh[lo:hi])
    # ldiff = (lh - log_mu) + ll + n*log_r, assembled in double-double
    d0 = _dd.two_sum(lh, -log_mu)
    d0 = (d0[0], d0[1] + coeff.ll[lo:hi])
    nr = _dd.two_prod(n, log_r)
    ldiff = _dd.dd_add(d0, nr)
    if np.any(gone):
        ldiff = (np.where(gone, -1e5, ldiff[0]), np.where(gone, 0.0, ldiff[1]))
    mag = _dd.dd_exp(ldiff)
    cr, ci = _coeff_cis(coeff.ph[lo:hi])
    re = (mag[0] * cr, mag[1] * cr)
    im = (mag[0] * ci, mag[1] * ci)
    return lo, hi, log_mu, (re, im)


def _cis_power_dd(x, k):
    """x^k for a complex-dd scalar by square-and-multiply."""
    acc = ((np.float64(1.0), np.float64(0.0)), (np.float64(0.0), np.float64(0.0)))
    base = x
    while k:
        if k & 1:
            acc = _dd.ddc_mul(acc, base)
        k >>= 1
        if k:
            base = _dd.ddc_mul(base, base)
    return acc


def _cis_dd_of(thetas):
    """cos/sin of given float64 angles to double-double accuracy (mpmath)."""
    n = len(thetas)
    re_h = np.empty(n); re_l = np.empty(n)
    im_h = np.empty(n); im_l = np.empty(n)
    with mp.workdps(40):
        for i, t in enumerate(thetas):
            c = mp.cos(mp.mpf(float(t)))
            s = mp.sin(mp.mpf(float(t)))
            ch = float(c); sh = float(s)
            re_h[i] = ch; re_l[i] = float(c - ch)
            im_h[i] = sh; im_l[i] = float(s - sh)
    return ((re_h, re_l), (im_h, im_l))


def _poly_at_points_d(t: np.ndarray, x: np.ndarray) -> np.ndarray:
    """sum t_s x^s over unit-modulus points x, blocked for BLAS speed."""
    n = len(t)
    if n == 0:
        return np.zeros_like(x)
    b = max(1, int(math.isqrt(n)))
    q = -(-n // b)
    tt = np.zeros(q * b, dtype=complex)
    tt[:n] = t
    xs = np.empty((b, len(x)), dtype=complex)
    xs[0] = 1.0
    for s in range(1, b):
        xs[s] = xs[s - 1] * x
    inner = tt.reshape(q, b) @ xs
    xb = xs[b - 1] * x
    acc = inner[q - 1]
    for row in range(q - 2, -1, -1):
        acc = acc * xb + inner[row]
    return acc


def _poly_at_points_dd(t, x, n_coeff):
    """Blocked sum of t_s x^s in complex double-double.

    t: complex-dd arrays of length n_coeff (coefficient axis)
    x: complex-dd arrays over points
    """
    m = len(x[0][0])
    b = max(1, int(math.isqrt(n_coeff)))
    q = -(-n_coeff // b)

    (tre_h, tre_l), (tim_h, tim_l) = t

    def tpad(a):
        out = np.zeros(q * b)
        out[:n_coeff] = a
        return out.reshape(q, b)

    tre_h, tre_l, tim_h, tim_l = map(tpad, (tre_h, tre_l, tim_h, tim_l))

    acc = _dd.ddc_zeros((q, m))
    # x^s for s in [0, b)
    xs = _unit_powers_dd_list(x, b)
    for s in range(b):
        ts = ((tre_h[:, s:s + 1], tre_l[:, s:s + 1]),
              (tim_h[:, s:s + 1], tim_l[:, s:s + 1]))
        acc = _dd.ddc_add(acc, _dd.ddc_mul(ts, xs[s]))
    xb = _dd.ddc_mul(xs[b - 1], x)
    out = ((acc[0][0][q - 1].copy(), acc[0][1][q - 1].copy()),
           (acc[1][0][q - 1].copy(), acc[1][1][q - 1].copy()))
    for row in range(q - 2, -1, -1):
        out = _dd.ddc_mul(out, xb)
        blk = ((acc[0][0][row], acc[0][1][row]), (acc[1][0][row], acc[1][1][row]))
        out = _dd.ddc_add(out, blk)
    return out


def _unit_powers_dd_list(x, count):
    """List of x^s (complex-dd arrays over points) for s in [0, count)."""
    m = len(x[0][0])
    ones = ((np.ones(m), np.zeros(m)), (np.zeros(m), np.zeros(m)))
    out = [ones]
    for _ in range(1, count):
        out.append(_dd.ddc_mul(out[-1], x))
    return out


def _finish(value_re_h, value_im_h, abs2_dd, log_mu, floor_ln, level):
    with np.errstate(divide="ignore", invalid="ignore"):
        logabs = log_mu + 0.5 * np.log(abs2_dd)
    logabs = np.where(np.isfinite(logabs), logabs, -np.inf)
    phase = np.arctan2(value_im_h, value_re_h)
    return EvalResult(logabs, phase, floor_ln, log_mu, level)


def eval_points(coeff: CoeffData, log_r: float, thetas: np.ndarray,
                level: str = "dd", dps: Optional[int] = None,
                _cis_seed=None) -> EvalResult:
    """Evaluate ln|f|, arg f at arbitrary angles on |z| = e^{log_r}."""
    thetas = np.asarray(thetas, dtype=float)
    if level == "d":
        lo, hi, log_mu, t = _terms_d(coeff, log_r)
        x = np.exp(1j * thetas)
        val = _poly_at_points_d(t, x) * x ** lo
        floor = log_mu + max(_EPS_LN["d"], coeff.rel_err_ln) + math.log(3.0 * (hi - lo))
        with np.errstate(divide="ignore"):
            logabs = np.where(val != 0, log_mu + np.log(np.abs(val)), -np.inf)
        return EvalResult(logabs, np.angle(val), floor, log_mu, "d")

    if level == "dd":
        lo, hi, log_mu, t = _terms_dd(coeff, log_r)
        x = _cis_seed if _cis_seed is not None else _cis_dd_of(thetas)
        val = _poly_at_points_dd(t, x, hi - lo)
        if lo:
            xlo = _ddc_pow_points(x, lo)
            val = _dd.ddc_mul(val, xlo)
        abs2 = _dd.ddc_abs2(val)[0]
        floor = log_mu + max(_EPS_LN["dd"], coeff.rel_err_ln) + math.log(3.0 * (hi - lo))
        return _finish(val[0][0], val[1][0], abs2, log_mu, floor, "dd")

    if level == "mp":
        if dps is None:
            raise ValueError("mp evaluation needs an explicit dps")
        return _eval_points_mp(coeff, log_r, thetas, dps)

    raise ValueError(f"unknown level {level!r}")


def _ddc_pow_points(x, k):
    acc = ((np.ones_like(x[0][0]), np.zeros_like(x[0][0])),
           (np.zeros_like(x[0][0]), np.zeros_like(x[0][0])))
    base = x
    while k:
        if k & 1:
            acc = _dd.ddc_mul(acc, base)
        k >>= 1
        if k:
            base = _dd.ddc_mul(base, base)
    return acc


def _eval_points_mp(coeff: CoeffData, log_r: float, thetas, dps: int) -> EvalResult:
    logs, phases = coeff.mp_logs(dps)
    n_all = np.arange(coeff.n_terms, dtype=float)
    x = coeff.lh + n_all * log_r
    finite = np.isfinite(x)
    log_mu = float(np.max(x[finite]))
    cut = dps * math.log(10) + 40.0
    keep = finite & (x >= log_mu - cut)
    idx = np.nonzero(keep)[0]
    lo, hi = int(idx[0]), int(idx[-1]) + 1

    m = len(thetas)
    logabs = np.full(m, -np.inf)
    phase = np.zeros(m)
    key = (dps, lo, hi)
    with mp.workdps(dps):
        a_band = coeff._a_cache.get(key)
        if a_band is None:
            a_band = [
                mp.exp(mp.mpc(logs[n], phases[n])) if math.isfinite(coeff.lh[n])
                else mp.mpc(0)
                for n in range(lo, hi)
            ]
            coeff._a_cache.clear()
            coeff._a_cache[key] = a_band
        r = mp.exp(mp.mpf(float(log_r)))
        for j, th in enumerate(thetas):
            z = r * mp.expjpi(mp.mpf(float(th)) / mp.pi)
            acc = mp.mpc(0)
            for n in range(hi - 1, lo - 1, -1):
                acc = acc * z + a_band[n - lo]
            if lo:
                acc = acc * z ** lo
            if acc != 0:
                logabs[j] = float(mp.log(abs(acc)))
                phase[j] = float(mp.atan2(acc.imag, acc.real))
    floor = log_mu + max(-0.95 * dps * math.log(10),
                         coeff.data_floor_ln(dps)) + math.log(3.0 * (hi - lo))
    return EvalResult(logabs, phase, floor, log_mu, "mp")


def eval_circle(coeff: CoeffData, log_r: float, m: int, offset: bool = True,
                level: str = "d", dps: Optional[int] = None) -> EvalResult:
    """Evaluate on m equispaced angles theta_j = 2 pi (j + offset/2) / m.

    The offset mesh dodges the real axis, where test subjects habitually
    keep their zeros.
    """
    if level == "d":
        lo, hi, log_mu, t = _terms_d(coeff, log_r)
        n = np.arange(lo, hi)
        if offset:
            # theta_j = 2 pi (j + 1/2) / m: twist each term by e^{i pi n / m}
            t = t * np.exp(1j * np.pi * n / m)
        # fold indices modulo m (exact evaluation of the trig sum by FFT)
        folded = np.zeros(m, dtype=complex)
        np.add.at(folded, n % m, t)
        val = m * np.fft.ifft(folded)
        floor = log_mu + max(_EPS_LN["d"], coeff.rel_err_ln) + math.log(3.0 * (hi - lo))
        with np.errstate(divide="ignore"):
            logabs = np.where(val != 0, log_mu + np.log(np.abs(val)), -np.inf)
        return EvalResult(logabs, np.angle(val), floor, log_mu, "d")

    thetas = (2.0 * np.pi) * (np.arange(m) + (0.5 if offset else 0.0)) / m
    if level == "dd":
        # equispaced: seed the point set from one accurately-computed root
        lo, hi, log_mu, t = _terms_dd(coeff, log_r)
        seed = _cis_dd_of(np.array([2.0 * np.pi / m, np.pi / m if offset else 0.0]))
        step = ((seed[0][0][0], seed[0][1][0]), (seed[1][0][0], seed[1][1][0]))
        x = _powers_from_step_dd(step, m)
        if offset:
            off = ((seed[0][0][1], seed[0][1][1]), (seed[1][0][1], seed[1][1][1]))
            x = _dd.ddc_mul(x, off)
        val = _poly_at_points_dd(t, x, hi - lo)
        if lo:
            val = _dd.ddc_mul(val, _ddc_pow_points(x, lo))
        abs2 = _dd.ddc_abs2(val)[0]
        floor = log_mu + max(_EPS_LN["dd"], coeff.rel_err_ln) + math.log(3.0 * (hi - lo))
        return _finish(val[0][0], val[1][0], abs2, log_mu, floor, "dd")
    return eval_points(coeff, log_r, thetas, level=level, dps=dps)


def _powers_from_step_dd(step, m):
    """[step^0 .. step^{m-1}] as complex-dd arrays, by binary doubling."""
    re_h = np.empty(m); re_l = np.empty(m)
    im_h = np.empty(m); im_l = np.empty(m)
    re_h[0], re_l[0], im_h[0], im_l[0] = 1.0, 0.0, 0.0, 0.0
    filled = 1
    while filled < m:
        take = min(filled, m - filled)
        blk = ((re_h[:take], re_l[:take]), (im_h[:take], im_l[:take]))
        mult = _cis_power_dd(step, filled)
        prod = _dd.ddc_mul(blk, mult)
        re_h[filled:filled + take] = prod[0][0]
        re_l[filled:filled + take] = prod[0][1]
        im_h[filled:filled + take] = prod[1][0]
        im_l[filled:filled + take] = prod[1][1]
        filled += take
    return ((re_h, re_l), (im_h, im_l))


def dps_for_floor(coeff: CoeffData, log_r: float, target_ln: float,
                  guard: float = 25.0) -> int:
    """dps needed so the mp noise floor sits below target_ln (in ln units)."""
    log_mu, _ = log_max_term(coeff, log_r)
    need = log_mu + math.log(3.0 * coeff.n_terms) + guard - target_ln
    return max(30, int(math.ceil(need / math.log(10))) + 5)
