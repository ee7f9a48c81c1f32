"""Nevanlinna proximity function, characteristic, and zero counting.

For an entire function the characteristic T(r, f) equals the proximity
function m(r, f) = (1/2pi) int log+ |f(r e^{i theta})| d theta, so the whole
module reduces to two numerical problems on the circle:

* quadrature of log+ |f|, which is smooth except for kinks where |f|
  crosses 1 and is spectrally handled by a periodic trapezoid rule plus an
  explicit correction at each located crossing;

* the winding number of f along the circle, which counts the enclosed
  zeros by the argument principle; the mesh is refined wherever the sampled
  phase increment exceeds pi/2 or the local rotation bound |z f'/f| says a
  cell could hide a full turn.

Both escalate through the evaluation engine's precision levels with
explicit noise-floor accounting: values of |f| far below the maximum term
are invisible to fixed-precision arithmetic, and pretending otherwise
silently corrupts m(r, f) (positive noise readings) and winding phases.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import _evalcore
from .series import PowerSeries, max_term, valuation

__all__ = ["CountingData", "RetryPerturbedRadius", "PrecisionBudgetError",
           "proximity", "proximity_detailed", "characteristic_entire",
           "zero_count", "count_zeros_grid", "integrated_count",
           "proximity_of_ratio"]

_TRUST_GUARD = 14.0  # nats above the floor a value must sit to be believed


class RetryPerturbedRadius(ArithmeticError):
    """A zero sits too close to the requested circle; retry nearby.

    Carries suggested replacement radii r*(1 +/- step).  The perturbation is
    caller-driven: this module never silently moves the radius.
    """

    def __init__(self, log_r: float, step: float = 1e-3, detail: str = ""):
        self.log_r = log_r
        self.suggested_log_radii = (log_r + math.log1p(step),
                                    log_r + math.log1p(-step))
        super().__init__(
            f"zero too close to |z| = e^{log_r:.6g}; retry at "
            f"r*(1+/-{step:g}). {detail}")


class PrecisionBudgetError(RuntimeError):
    """The evaluation depth needed exceeds the configured precision budget."""


@dataclass(frozen=True)
class CountingData:
    """Sampled zero counts n(r_i), plus the origin multiplicity.

    counts must be nondecreasing and never below count_at_zero.
    """

    radii: tuple
    counts: tuple
    count_at_zero: int = 0

    def __post_init__(self):
        if len(self.radii) != len(self.counts):
            raise ValueError("radii/counts length mismatch")
        if any(b <= a for a, b in zip(self.radii, self.radii[1:])):
            raise ValueError("radii must be strictly increasing")
        if any(b < a for a, b in zip(self.counts, self.counts[1:])):
            raise ValueError("counts must be nondecreasing")
        if any(c < self.count_at_zero for c in self.counts):
            raise ValueError("counts cannot be below the origin multiplicity")

    def to_csv(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("r,n,N\n")
            for r, n in zip(self.radii, self.counts):
                fh.write(f"{r!r},{n},{integrated_count(self, math.log(r))!r}\n")


@dataclass(frozen=True)
class ProximityResult:
    value: float
    n_angles: int
    converged: bool
    level: str
    uncertainty: float


_GL_NODES = np.array([-0.8611363115940526, -0.3399810435848563,
                      0.3399810435848563, 0.8611363115940526])
_GL_WTS = np.array([0.34785484513745385, 0.6521451548625461,
                    0.6521451548625461, 0.34785484513745385])


def _logplus_quadrature(coeff, log_r, m, level, dps):
    """One pass of (1/2pi) int log+|f| at resolution m.

    ln|f| is analytic along the circle away from zeros; only its positive
    part has kinks, exactly where ln|f| crosses 0.  A periodic trapezoid is
    spectrally accurate when there are no crossings; otherwise the crossings
    are located by bisection and each positive arc is integrated by
    composite Gauss panels at the mesh resolution.

    Returns (estimate, floor-driven uncertainty bound).
    """
    res = _evalcore.eval_circle(coeff, log_r, m, offset=True,
                                level=level, dps=dps)
    v = res.logabs
    trust = res.floor_ln + _TRUST_GUARD
    # Points reading below the trust line have unknown true value in
    # (-inf, trust]; when trust <= 0 their log+ contribution is exactly 0.
    unc = float(np.count_nonzero(v < trust)) / m * max(trust, 0.0)

    pos = v > 0.0
    cells = np.nonzero(pos != np.roll(pos, -1))[0]
    if len(cells) == 0 or len(cells) > m // 4:
        return float(np.mean(np.maximum(v, 0.0))), unc

    h = 2.0 * math.pi / m
    thetas = (2.0 * math.pi) * (np.arange(m) + 0.5) / m
    a = thetas[cells]
    b = a + h
    fa = v[cells]
    for _ in range(42):
        mid = 0.5 * (a + b)
        fm = _evalcore.eval_points(coeff, log_r, mid, level=level,
                                   dps=dps).logabs
        left = (fa > 0) != (fm > 0)
        b = np.where(left, mid, b)
        a = np.where(left, a, mid)
        fa = np.where(left, fa, fm)
    crossings = np.sort(0.5 * (a + b))

    # positive arcs alternate with negative ones; orient by the sign just
    # after the first crossing
    idx = int(np.searchsorted(thetas, crossings[0]))
    sign_after = bool(pos[idx % m])
    starts = crossings[0::2] if sign_after else crossings[1::2]
    ends_src = crossings[1::2] if sign_after else np.append(
        crossings[2::2], crossings[0] + 2.0 * math.pi)
    total = 0.0
    for s, e in zip(starts, ends_src):
        if e <= s:
            e += 2.0 * math.pi
        n_panel = max(2, int(math.ceil((e - s) / h)))
        edges = np.linspace(s, e, n_panel + 1)
        mids = 0.5 * (edges[:-1] + edges[1:])
        halfw = 0.5 * (edges[1:] - edges[:-1])
        pts = (mids[:, None] + halfw[:, None] * _GL_NODES[None, :]).ravel()
        gv = _evalcore.eval_points(
            coeff, log_r, pts % (2.0 * math.pi), level=level,
            dps=dps).logabs.reshape(n_panel, 4)
        total += float(np.sum(halfw[:, None] * _GL_WTS[None, :]
                              * np.maximum(gv, 0.0)))
    return total / (2.0 * math.pi), unc


def proximity_detailed(f: PowerSeries, log_r: float,
                       n_angles_start: int = 128, rel_tol: float = 1e-8,
                       max_angles: int = 1 << 16,
                       dps_budget: int = 600) -> ProximityResult:
    """m(r, f) with convergence and precision-escalation diagnostics."""
    f.check_radius(log_r)
    coeff = f.coeff
    abs_floor_tol = 1e-10
    for level in ("d", "dd", "mp"):
        dps = None
        if level == "mp":
            # choose dps so untrusted readings certainly sit below log+ = 0
            dps = _evalcore.dps_for_floor(coeff, log_r,
                                          -2.0 * _TRUST_GUARD)
            if dps > dps_budget:
                raise PrecisionBudgetError(
                    f"m(r) at ln r = {log_r:.4g} needs ~{dps} digits, "
                    f"budget is {dps_budget}")
        m = n_angles_start
        prev = None
        while True:
            est, unc = _logplus_quadrature(coeff, log_r, m, level, dps)
            tol = max(rel_tol * max(1.0, abs(est)), abs_floor_tol)
            if unc > 0.5 * tol:
                break  # escalate precision level
            if prev is not None and abs(est - prev) <= tol:
                return ProximityResult(est, m, True, level, unc)
            if m >= max_angles:
                return ProximityResult(est, m, False, level, unc)
            prev = est
            m *= 2
    raise PrecisionBudgetError("proximity could not reach the noise target")


def proximity(f: PowerSeries, log_r: float, n_angles_start: int = 128) -> float:
    """m(r, f): trapezoid over equispaced angles, doubled until successive
    estimates agree to 1e-8 relative (or the angle cap is reached)."""
    return proximity_detailed(f, log_r, n_angles_start).value


def characteristic_entire(f: PowerSeries, log_r: float) -> float:
    """T(r, f) for entire f: equals m(r, f) since N(r, f) = 0."""
    return proximity(f, log_r)


def proximity_of_ratio(num: PowerSeries, den: PowerSeries, log_r: float,
                       n_angles_start: int = 256, rel_tol: float = 1e-6,
                       max_angles: int = 1 << 14,
                       mask_margin: float = 1e-8) -> float:
    """m(r, num/den) by quadrature of (ln|num| - ln|den|)+.

    Angles where |den| falls below mask_margin * mu_den(r) are masked out of
    the quadrature (their ratio is numerically unreliable near zeros of the
    denominator); the estimate is therefore a slightly trimmed mean.
    """
    num.check_radius(log_r)
    den.check_radius(log_r)
    m = n_angles_start
    prev = None
    while True:
        rn = _evalcore.eval_circle(num.coeff, log_r, m, offset=True, level="dd")
        rd = _evalcore.eval_circle(den.coeff, log_r, m, offset=True, level="dd")
        mask_ln = max(rd.log_mu + math.log(mask_margin),
                      rd.floor_ln + _TRUST_GUARD)
        ok = rd.logabs >= mask_ln
        diff = np.where(ok, np.maximum(rn.logabs - rd.logabs, 0.0), 0.0)
        est = float(np.mean(diff))
        if prev is not None and abs(est - prev) <= rel_tol * max(1.0, abs(est)):
            return est
        if m >= max_angles:
            return est
        prev = est
        m *= 2


def _wrap_phase(d: np.ndarray) -> np.ndarray:
    return (d + math.pi) % (2.0 * math.pi) - math.pi


def zero_count(f: PowerSeries, log_r: float, zero_margin: float = 1e-8,
               n_angles_start: Optional[int] = None,
               max_points: int = 1 << 18, dps_budget: int = 600) -> int:
    """n(r, 1/f): zeros in |z| <= r, by the winding number of f.

    The argument increments of f along an adaptive angular mesh are
    accumulated.  A sampled increment alone cannot rule out a hidden full
    turn inside a cell, so cells are also refined while the local rotation
    bound |z f'/f| (which dominates d arg f / d theta for analytic f) times
    the cell width exceeds ~1 radian; only then is the wrapped increment
    trusted.  If |f| anywhere on the mesh falls below zero_margin * mu(r)
    (after the engine's own noise floor is cleared by escalating
    precision), a zero is too close to the circle and RetryPerturbedRadius
    carries the suggested replacement radii.  Pass zero_margin="auto" to
    accept whatever the arithmetic can actually resolve.
    """
    from .series import derivative  # local import avoids cycle at load

    f.check_radius(log_r)
    coeff = f.coeff
    fp = derivative(f)
    mt = max_term(f, log_r)

    auto = zero_margin == "auto"
    for level in ("dd", "mp"):
        dps = None
        if level == "mp":
            target = min(0.0, log_r) - 45.0
            dps = _evalcore.dps_for_floor(coeff, log_r, target)
            if dps > dps_budget:
                raise PrecisionBudgetError(
                    f"winding at ln r = {log_r:.4g} needs ~{dps} digits, "
                    f"budget is {dps_budget}")
            # expensive per point: start coarse, let refinement concentrate
            m_start = n_angles_start or 512
        else:
            m_start = n_angles_start or 1 << max(8, min(12, int(math.ceil(
                math.log2(8.0 * (mt.nu + 4))))))

        def _eval_pair(pts):
            rf = _evalcore.eval_points(coeff, log_r, pts % (2.0 * math.pi),
                                       level=level, dps=dps)
            rd = _evalcore.eval_points(fp.coeff, log_r,
                                       pts % (2.0 * math.pi),
                                       level=level, dps=dps)
            with np.errstate(over="ignore"):
                vel = np.exp(np.minimum(rd.logabs - rf.logabs + log_r, 700.0))
            return rf, vel

        res = _evalcore.eval_circle(coeff, log_r, m_start, offset=True,
                                    level=level, dps=dps)
        resp = _evalcore.eval_circle(fp.coeff, log_r, m_start, offset=True,
                                     level=level, dps=dps)
        margin_ln = (res.floor_ln + 9.0 if auto
                     else res.log_mu + math.log(zero_margin))
        vmin = float(np.min(res.logabs))
        if vmin < res.floor_ln + _TRUST_GUARD and level != "mp":
            continue  # cannot certify the margin at this level; escalate
        if vmin < margin_ln:
            raise RetryPerturbedRadius(log_r, detail=f"min ln|f| = {vmin:.4g}"
                                       f" below margin {margin_ln:.4g}")
        thetas = (2.0 * math.pi) * (np.arange(m_start) + 0.5) / m_start
        phases = res.phase
        with np.errstate(over="ignore"):
            vels = np.exp(np.minimum(resp.logabs - res.logabs + log_r, 700.0))
        tail_ok = True
        for _round in range(48):
            dphi = _wrap_phase(np.diff(np.concatenate([phases,
                                                       [phases[0]]])))
            gaps = np.diff(np.concatenate([thetas,
                                           [thetas[0] + 2.0 * math.pi]]))
            vmax = np.maximum(vels, np.roll(vels, -1))
            bad = np.nonzero((np.abs(dphi) > 0.5 * math.pi)
                             | (gaps * vmax > 1.0))[0]
            if len(bad) == 0:
                break
            if len(thetas) + len(bad) > max_points:
                raise RetryPerturbedRadius(
                    log_r, detail="mesh budget exhausted (zero on circle?)")
            nxt = np.concatenate([thetas[1:], [thetas[0] + 2.0 * math.pi]])
            mids = 0.5 * (thetas[bad] + nxt[bad])
            mres, mvel = _eval_pair(mids)
            mmin = float(np.min(mres.logabs))
            if mmin < mres.floor_ln + _TRUST_GUARD and level != "mp":
                tail_ok = False
                break
            if mmin < margin_ln:
                raise RetryPerturbedRadius(
                    log_r, detail=f"refined min ln|f| = {mmin:.4g} below "
                    f"margin {margin_ln:.4g}")
            order = np.argsort(np.concatenate([thetas, mids]))
            thetas = np.concatenate([thetas, mids])[order]
            phases = np.concatenate([phases, mres.phase])[order]
            vels = np.concatenate([vels, mvel])[order]
        else:
            raise RetryPerturbedRadius(log_r, detail="refinement stalled")
        if not tail_ok:
            continue
        d = _wrap_phase(np.diff(phases))
        total = float(np.sum(d) + _wrap_phase(phases[0] - phases[-1]))
        w = total / (2.0 * math.pi)
        if abs(w - round(w)) > 1e-6:
            raise RetryPerturbedRadius(
                log_r, detail=f"winding {w:.8f} not close to an integer")
        return int(round(w))
    raise PrecisionBudgetError("zero_count escalation failed")


def count_zeros_grid(f: PowerSeries, radii: Sequence[float],
                     zero_margin="auto", retry_step: float = 1e-3,
                     max_retries: int = 3, dps_budget: int = 600) -> CountingData:
    """Counts over a radius grid, applying the perturbed-radius retry rule.

    The returned data records the radii actually used (after perturbation).
    """
    used, counts = [], []
    m0 = valuation(f)
    for r in radii:
        log_r = math.log(r)
        for attempt in range(max_retries + 1):
            try:
                n = zero_count(f, log_r, zero_margin=zero_margin,
                               dps_budget=dps_budget)
                used.append(math.exp(log_r))
                counts.append(n)
                break
            except RetryPerturbedRadius as err:
                if attempt == max_retries:
                    raise
                log_r = err.suggested_log_radii[attempt % 2] + \
                    attempt * math.log1p(retry_step)
    return CountingData(tuple(used), tuple(counts), m0)


def integrated_count(data: CountingData, log_r: float) -> float:
    """N(r) = int_0^r (n(t) - n(0))/t dt + n(0) log r, exactly for step data.

    n(t) is the step function jumping at the recorded radii; radii must
    cover the requested r (no extrapolation).
    """
    r = math.exp(log_r)
    if not data.radii:
        return 0.0
    if r > data.radii[-1] * (1.0 + 1e-12):
        raise ValueError(f"requested r = {r:.6g} beyond counted range "
                         f"{data.radii[-1]:.6g}")
    n0 = data.count_at_zero
    terms = []
    for i, (ri, ni) in enumerate(zip(data.radii, data.counts)):
        if ri >= r:
            break
        r_next = min(r, data.radii[i + 1]) if i + 1 < len(data.radii) else r
        if ni > n0:
            terms.append((ni - n0) * (math.log(r_next) - math.log(ri)))
    return math.fsum(terms) + n0 * log_r
