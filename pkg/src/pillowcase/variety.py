"""Numerical realization of the two perturbed varieties as zero sets.

Away from the four half-lattice points of the base torus the projection of
either variety to (gamma, theta) is a two-sheeted cover; over small disks
around those points (radius about 2|s|) the fibers are empty, and the two
regimes are separated by four fold circles.  This module solves fibers by
continuation in s from the closed-form s = 0 solutions, extracts the fold
circles in rotated corner charts, verifies the resulting surface topology,
and provides the closed-form circle of representations over the bottom edge.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import quat
from . import _kernels
from .words import BYPASS, ChartPoint, Rep

# chart-domain corners of the base torus, indexed by the sign pair
# (eps_gamma, eps_theta) = (sign cos gamma, sign cos theta)
CORNER_BASE = {
    (1, 1): (0.0, 0.0),
    (-1, 1): (np.pi, 0.0),
    (1, -1): (0.0, np.pi),
    (-1, -1): (np.pi, np.pi),
}

FOLD_COND_THRESHOLD = 1e8


class ContinuationError(RuntimeError):
    """A fiber or fold continuation failed to converge or to close up."""


def tau_seed(gamma: float, theta: float) -> float:
    """tau of the + sheet at s = 0: (cos tau, sin tau) ~ (sin gamma, sin theta)."""
    return float(np.arctan2(np.sin(theta), np.sin(gamma)))


@dataclass
class FiberSolutions:
    variant: str
    s: float
    gamma: float
    theta: float
    solutions: list[tuple[float, float]]
    status: str  # two_sheets | fold_region | empty
    cond: float = 1.0

    def chart_points(self) -> list[ChartPoint]:
        return [ChartPoint(self.s, self.gamma, self.theta, nu, tau, self.variant)
                for nu, tau in self.solutions]


def _dedup(roots: list[tuple[float, float]], radius: float = 1e-6):
    out: list[tuple[float, float]] = []
    for nu, tau in roots:
        tau = float(np.mod(tau, 2 * np.pi))
        dup = False
        for nu2, tau2 in out:
            dtau = abs(np.mod(tau - tau2 + np.pi, 2 * np.pi) - np.pi)
            if np.hypot(nu - nu2, dtau) < radius:
                dup = True
                break
        if not dup:
            out.append((float(nu), tau))
    return out


def _scan_roots(variant: str, s: float, gamma: float, theta: float, n_tau: int = 96):
    """Independent root sweep at fixed (gamma, theta): solve the second
    defining equation for nu along a tau grid, then bracket sign changes of
    the first.  Also reports the minimum |g1| over the grid for fold-band
    detection."""
    taus = np.linspace(0.0, 2 * np.pi, n_tau, endpoint=False)
    if variant == BYPASS:
        nus = np.zeros_like(taus)
    else:
        nus = np.full_like(taus, s * np.cos(gamma))
        for _ in range(8):
            g1, g2 = _kernels.g_pair(variant, s, gamma, theta, nus, taus)
            d = (_kernels.g_pair(variant, s, gamma, theta, nus + 1e-6, taus)[1]
                 - _kernels.g_pair(variant, s, gamma, theta, nus - 1e-6, taus)[1]) / 2e-6
            step = np.where(np.abs(d) > 1e-12, -g2 / d, 0.0)
            nus = np.clip(nus + step, -0.49, 0.49)
            if np.max(np.abs(g2)) < 1e-13:
                break
    g1, _ = _kernels.g_pair(variant, s, gamma, theta, nus, taus)
    roots = []
    for i in range(n_tau):
        j = (i + 1) % n_tau
        if g1[i] == 0.0 or (g1[i] < 0) != (g1[j] < 0):
            frac = abs(g1[i]) / max(abs(g1[i]) + abs(g1[j]), 1e-300)
            tau0 = taus[i] + frac * (2 * np.pi / n_tau)
            nu0 = nus[i] + frac * (nus[j] - nus[i])
            roots.append((float(nu0), float(tau0)))
    return roots, float(np.min(np.abs(g1))), float(np.max(np.abs(g1)))


def solve_fiber(variant: str, s: float, gamma: float, theta: float, *,
                s_step: float = 0.01, tol: float = 1e-10,
                dedup_radius: float = 1e-6) -> FiberSolutions:
    """Roots of the defining pair in (nu, tau) over one base point.

    Seeds come from the closed-form s = 0 solutions and are continued to the
    target s in steps of at most ``s_step``; an independent tau sweep at the
    target guards against lost roots.  Status is ``fold_region`` when roots
    merge or the Jacobian degenerates, ``empty`` when no root survives.
    """
    code = _kernels.variant_code(variant)
    amp = float(np.hypot(np.sin(gamma), np.sin(theta)))
    if s == 0.0:
        if amp < 1e-12:
            # a whole circle of solutions over a half-lattice point
            return FiberSolutions(variant, s, gamma, theta, [], "fold_region",
                                  cond=np.inf)
        t0 = tau_seed(gamma, theta)
        sols = [(0.0, float(np.mod(t0, 2 * np.pi))),
                (0.0, float(np.mod(t0 + np.pi, 2 * np.pi)))]
        return FiberSolutions(variant, s, gamma, theta, sols, "two_sheets")

    n_steps = max(1, int(np.ceil(abs(s) / s_step)))
    roots: list[tuple[float, float]] = []
    worst_cond = 1.0
    t0 = tau_seed(gamma, theta)
    for tau0 in (t0, t0 + np.pi):
        nu, tau = 0.0, tau0
        alive = amp >= 1e-12
        for i in range(1, n_steps + 1):
            si = s * i / n_steps
            nu2, tau2, ok, cond = _kernels.newton_fiber(code, si, gamma, theta,
                                                        nu, tau, 1e-12, 50)
            if not ok:
                # retry in quarter increments before giving up on this seed
                sub_ok = True
                nu_r, tau_r = nu, tau
                for k in range(1, 5):
                    sk = s * (i - 1 + k / 4) / n_steps
                    nu_r, tau_r, ok_r, cond = _kernels.newton_fiber(
                        code, sk, gamma, theta, nu_r, tau_r, 1e-12, 50)
                    if not ok_r:
                        sub_ok = False
                        break
                if not sub_ok:
                    alive = False
                    break
                nu2, tau2 = nu_r, tau_r
            nu, tau = nu2, tau2
            worst_cond = max(worst_cond, cond)
        if alive:
            roots.append((nu, tau))

    scan, g1_min, g1_max = _scan_roots(variant, s, gamma, theta)
    for nu0, tau0 in scan:
        nu, tau, ok, cond = _kernels.newton_fiber(code, s, gamma, theta, nu0,
                                                  tau0, 1e-12, 50)
        if ok:
            roots.append((nu, tau))
            worst_cond = max(worst_cond, cond)

    # final polish and residual gate
    polished = []
    for nu, tau in _dedup(roots, dedup_radius):
        nu, tau, ok, cond = _kernels.newton_fiber(code, s, gamma, theta, nu,
                                                  tau, 1e-13, 50)
        g1, g2 = _kernels.g_scalar(code, s, gamma, theta, nu, tau)
        if ok and max(abs(g1), abs(g2)) < tol:
            polished.append((nu, tau))
            worst_cond = max(worst_cond, cond)
    polished = _dedup(polished, dedup_radius)

    if len(polished) >= 2:
        status = "two_sheets" if worst_cond < FOLD_COND_THRESHOLD else "fold_region"
    elif len(polished) == 1:
        status = "fold_region"
    else:
        # no roots: empty when the sweep stayed uniformly away from zero,
        # fold band when it grazed
        status = "empty" if g1_min > 0.02 * max(g1_max, 1e-12) else "fold_region"
    return FiberSolutions(variant, s, gamma, theta, polished, status,
                          cond=worst_cond)


# ---------------------------------------------------------------------------
# fold circles via rotated corner charts
# ---------------------------------------------------------------------------

@dataclass
class FoldCircle:
    corner: tuple[int, int]
    variant: str
    s: float
    points: list[ChartPoint]
    image: np.ndarray  # (n, 2) samples of (sin gamma, sin theta) near the corner

    @property
    def radii(self) -> np.ndarray:
        return np.hypot(self.image[:, 0], self.image[:, 1])

    def winding(self) -> int:
        ang = np.arctan2(self.image[:, 1], self.image[:, 0])
        d = np.diff(np.unwrap(np.append(ang, ang[0])))
        return int(np.round(np.sum(d) / (2 * np.pi)))


def _chart_angles(x: float, y: float, tau: float, eps: tuple[int, int]):
    sg = x * np.cos(tau) - y * np.sin(tau)
    st = x * np.sin(tau) + y * np.cos(tau)
    g = np.arcsin(np.clip(sg, -1.0, 1.0))
    if eps[0] < 0:
        g = np.pi - g
    t = np.arcsin(np.clip(st, -1.0, 1.0))
    if eps[1] < 0:
        t = np.pi - t
    return g, t, sg, st


def _solve_chart(variant_code: int, s: float, x: float, tau: float,
                 eps: tuple[int, int], y0: float, nu0: float):
    """Solve the defining pair for (y, nu) at fixed (x, tau) in the corner
    chart, where the system is regular through the fold."""
    y, nu = y0, nu0
    for _ in range(60):
        g, t, _, _ = _chart_angles(x, y, tau, eps)
        f1, f2 = _kernels.g_scalar(variant_code, s, g, t, nu, tau)
        if max(abs(f1), abs(f2)) < 1e-13:
            return y, nu, True
        fd = 1e-7
        gp, tp, _, _ = _chart_angles(x, y + fd, tau, eps)
        gm, tm, _, _ = _chart_angles(x, y - fd, tau, eps)
        a11 = (_kernels.g_scalar(variant_code, s, gp, tp, nu, tau)[0]
               - _kernels.g_scalar(variant_code, s, gm, tm, nu, tau)[0]) / (2 * fd)
        a21 = (_kernels.g_scalar(variant_code, s, gp, tp, nu, tau)[1]
               - _kernels.g_scalar(variant_code, s, gm, tm, nu, tau)[1]) / (2 * fd)
        a12 = (_kernels.g_scalar(variant_code, s, g, t, nu + fd, tau)[0]
               - _kernels.g_scalar(variant_code, s, g, t, nu - fd, tau)[0]) / (2 * fd)
        a22 = (_kernels.g_scalar(variant_code, s, g, t, nu + fd, tau)[1]
               - _kernels.g_scalar(variant_code, s, g, t, nu - fd, tau)[1]) / (2 * fd)
        det = a11 * a22 - a12 * a21
        if abs(det) < 1e-300:
            return y, nu, False
        dy = -(f1 * a22 - f2 * a12) / det
        dnu = -(a11 * f2 - a21 * f1) / det
        y += dy
        nu += dnu
        if abs(nu) > 0.6 or abs(y) > 0.9:
            return y, nu, False
    return y, nu, False


def _det_dgamma(variant_code: int, s: float, x: float, tau: float,
                eps: tuple[int, int], seed):
    """det of the chart-coordinate differential along the solved sheet:
    dY/dtau + x + Y dY/dx, whose zero set is the critical circle."""
    fd = 1e-5
    y, nu, ok = _solve_chart(variant_code, s, x, tau, eps, seed[0], seed[1])
    if not ok:
        raise ContinuationError("corner-chart solve failed")
    yxp, _, ok1 = _solve_chart(variant_code, s, x + fd, tau, eps, y, nu)
    yxm, _, ok2 = _solve_chart(variant_code, s, x - fd, tau, eps, y, nu)
    ytp, _, ok3 = _solve_chart(variant_code, s, x, tau + fd, eps, y, nu)
    ytm, _, ok4 = _solve_chart(variant_code, s, x, tau - fd, eps, y, nu)
    if not (ok1 and ok2 and ok3 and ok4):
        raise ContinuationError("corner-chart solve failed in FD stencil")
    dydx = (yxp - yxm) / (2 * fd)
    dydt = (ytp - ytm) / (2 * fd)
    return dydt + x + y * dydx, y, nu


def fold_locus(variant: str, s: float, n_samples: int = 192) -> list[FoldCircle]:
    """The four fold circles of the projection to the base torus.

    For each corner sign pair the critical set is cut out, in the rotated
    chart (x, y, tau), by the vanishing of the sheet's Jacobian determinant;
    that equation is solved for x along a tau grid.
    """
    if s == 0.0:
        raise ValueError("fold circles require s != 0")
    code = _kernels.variant_code(variant)
    out = []
    for eps in [(1, 1), (-1, 1), (1, -1), (-1, -1)]:
        pts = []
        img = []
        x = 0.0
        seed = (-2.0 * s * eps[0] * eps[1], s * np.cos(0.0) * eps[0])
        for tau in np.linspace(0.0, 2 * np.pi, n_samples, endpoint=False):
            f0, y, nu = _det_dgamma(code, s, x, tau, eps, seed)
            # the inner solves leave FD noise on the determinant, so keep the
            # best iterate and accept roots to ~1e-8 in x (<< the s^2 scale)
            best = (abs(f0), x, y, nu)
            for _ in range(40):
                if abs(f0) < 1e-10:
                    break
                f1, _, _ = _det_dgamma(code, s, x + 1e-6, tau, eps, (y, nu))
                d = (f1 - f0) / 1e-6
                if abs(d) < 1e-12:
                    break
                step = -f0 / d
                x = x + step
                if abs(x) > 0.5:
                    raise ContinuationError("fold circle left the corner chart")
                f0, y, nu = _det_dgamma(code, s, x, tau, eps, (y, nu))
                if abs(f0) < best[0]:
                    best = (abs(f0), x, y, nu)
                if abs(step) < 1e-11:
                    break
            if best[0] > 1e-8:
                raise ContinuationError("fold root Newton did not converge")
            _, x, y, nu = best
            seed = (y, nu)
            g, t, sg, st = _chart_angles(x, y, tau, eps)
            pts.append(ChartPoint(s, g, t, nu, tau, variant))
            img.append((sg, st))
        img = np.asarray(img)
        circ = FoldCircle(eps, variant, s, pts, img)
        # closure and winding checks
        gap = np.linalg.norm(img[0] - img[-1])
        spacing = np.median(np.linalg.norm(np.diff(img, axis=0), axis=1))
        if gap > 10 * spacing:
            raise ContinuationError(f"fold circle at corner {eps} failed to close")
        if np.min(circ.radii) < 0.2 * abs(s):
            raise ContinuationError(f"fold circle at corner {eps} collapsed")
        if abs(circ.winding()) != 1:
            raise ContinuationError(f"fold image at corner {eps} does not "
                                    "wind once around the corner")
        out.append(circ)
    return out


def fold_jacobian_data(pt: ChartPoint):
    """Rank data of the two restriction differentials at a chart point.

    Returns (sv0, ker0, sv1, ker1): singular values and kernel vectors of the
    base projection and of the second-factor character map, both restricted
    to the surface tangent plane at pt.
    """
    from .projection import pi1_r3_of_chart  # local import to avoid a cycle

    code = _kernels.variant_code(pt.variant)
    x = np.array([pt.gamma, pt.theta, pt.nu, pt.tau])
    fd = 1e-6
    dg = np.zeros((2, 4))
    for k in range(4):
        xp = x.copy(); xp[k] += fd
        xm = x.copy(); xm[k] -= fd
        fp = _kernels.g_scalar(code, pt.s, xp[0], xp[1], xp[2], xp[3])
        fm = _kernels.g_scalar(code, pt.s, xm[0], xm[1], xm[2], xm[3])
        dg[0, k] = (fp[0] - fm[0]) / (2 * fd)
        dg[1, k] = (fp[1] - fm[1]) / (2 * fd)
    _, _, vt = np.linalg.svd(dg)
    t1, t2 = vt[2], vt[3]  # orthonormal basis of the tangent plane

    m0 = np.column_stack([t1[:2], t2[:2]])
    sv0 = np.linalg.svd(m0, compute_uv=False)
    ker0 = np.linalg.svd(m0)[2][-1]

    step = 1e-5
    cols = []
    for t in (t1, t2):
        xp = x + step * t
        xm = x - step * t
        vp = pi1_r3_of_chart(pt.s, *xp, variant=pt.variant)
        vm = pi1_r3_of_chart(pt.s, *xm, variant=pt.variant)
        cols.append((vp - vm) / (2 * step))
    m1 = np.column_stack(cols)
    sv1 = np.linalg.svd(m1, compute_uv=False)
    ker1 = np.linalg.svd(m1)[2][-1]
    return sv0, ker0, sv1, ker1


# ---------------------------------------------------------------------------
# topology of the two-sheeted picture
# ---------------------------------------------------------------------------

@dataclass
class TopologyReport:
    variant: str
    s: float
    grid: int
    counts: dict
    fold_circles: int
    consistent: bool
    degenerate: bool
    euler_characteristic: int | None
    genus_cover: int | None
    genus_quotient: int | None
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "variant": self.variant,
            "s": self.s,
            "grid": self.grid,
            "counts": self.counts,
            "fold_circles": self.fold_circles,
            "consistent": self.consistent,
            "degenerate": self.degenerate,
            "euler_characteristic": self.euler_characteristic,
            "genus_cover": self.genus_cover,
            "genus_quotient": self.genus_quotient,
            "notes": self.notes,
        }


def _corner_distance(gamma: float, theta: float) -> float:
    """Torus distance to the nearest half-lattice fixed point."""
    dg = min(abs(np.mod(gamma, np.pi)), np.pi - abs(np.mod(gamma, np.pi)))
    dt = min(abs(np.mod(theta, np.pi)), np.pi - abs(np.mod(theta, np.pi)))
    return float(np.hypot(dg, dt))


def classify_grid(variant: str, s: float, grid: int = 64):
    """Status of every fiber over a grid x grid sweep of the base torus.

    Fibers well away from the four corners are classified in bulk with the
    vectorized Newton (both sheets continued from the s = 0 seeds at once);
    the slow careful solver handles the near-corner band.
    """
    gs = np.linspace(0.0, 2 * np.pi, grid, endpoint=False)
    ts = np.linspace(0.0, 2 * np.pi, grid, endpoint=False)
    status = np.empty((grid, grid), dtype=object)
    if s == 0.0:
        for i, g in enumerate(gs):
            for j, t in enumerate(ts):
                status[i, j] = solve_fiber(variant, s, g, t).status
        return gs, ts, status

    gg, tt = np.meshgrid(gs, ts, indexing="ij")
    gflat = gg.ravel()
    tflat = tt.ravel()
    dist = np.array([_corner_distance(g, t) for g, t in zip(gflat, tflat)])
    band = dist <= max(4.0 * abs(s), 0.25)

    t0 = np.arctan2(np.sin(tflat), np.sin(gflat))
    nus = np.zeros((2, gflat.size))
    taus = np.stack([t0, t0 + np.pi])
    ok = np.ones((2, gflat.size), dtype=bool)
    n_steps = max(1, int(np.ceil(abs(s) / 0.01)))
    for i in range(1, n_steps + 1):
        si = s * i / n_steps
        for sheet in range(2):
            nus[sheet], taus[sheet], oki = _kernels.newton_fiber_batch(
                variant, si, gflat, tflat, nus[sheet], taus[sheet])
            ok[sheet] &= oki
    dtau = np.abs(np.mod(taus[0] - taus[1] + np.pi, 2 * np.pi) - np.pi)
    sep = np.hypot(nus[0] - nus[1], dtau) > 1e-4
    bulk_two = ok[0] & ok[1] & sep & ~band

    flat_status = np.empty(gflat.size, dtype=object)
    flat_status[bulk_two] = "two_sheets"
    for idx in np.nonzero(~bulk_two)[0]:
        flat_status[idx] = solve_fiber(variant, s, gflat[idx], tflat[idx]).status
    return gs, ts, flat_status.reshape(grid, grid)


def verify_topology(variant: str, s: float, grid: int = 64) -> TopologyReport:
    """Check the two-sheets-outside / empty-inside / four-circles model and
    derive the Euler characteristic and genera."""
    notes: list[str] = []
    if s == 0.0:
        # degenerate fibers over the fixed points are whole circles
        fixed = [solve_fiber(variant, 0.0, g0, t0).status
                 for g0, t0 in CORNER_BASE.values()]
        ok = all(st == "fold_region" for st in fixed)
        notes.append("s = 0: circle fibers over the four fixed points; the "
                     "quotient is not a manifold quotient of a smooth family")
        return TopologyReport(variant, s, grid, {"fixed_points": fixed}, 0,
                              ok, True, None, None, None, notes)

    circles = fold_locus(variant, s)
    r_max = max(float(np.max(c.radii)) for c in circles)
    r_min = min(float(np.min(c.radii)) for c in circles)
    # fold radii in angle coordinates agree with sin-coordinates to O(r^3)
    band_out = 1.3 * r_max
    band_in = 0.7 * r_min

    gs, ts, status = classify_grid(variant, s, grid)
    counts = {"two_sheets": 0, "fold_region": 0, "empty": 0}
    consistent = True
    for i, g in enumerate(gs):
        for j, t in enumerate(ts):
            st = status[i, j]
            counts[st] += 1
            d = _corner_distance(g, t)
            if d > band_out and st != "two_sheets":
                consistent = False
                notes.append(f"fiber ({g:.3f},{t:.3f}) outside fold disks is {st}")
            if d < band_in and st != "empty":
                consistent = False
                notes.append(f"fiber ({g:.3f},{t:.3f}) inside fold disks is {st}")

    # refined sweep near the fold band
    refine = 4
    for g0, t0 in CORNER_BASE.values():
        local = np.linspace(-2 * r_max, 2 * r_max, refine * 8)
        for dg in local:
            for dt in local:
                st = solve_fiber(variant, s, g0 + dg, t0 + dt).status
                d = float(np.hypot(dg, dt))
                if d > band_out and st != "two_sheets":
                    consistent = False
                    notes.append(f"refined fiber near {g0, t0} at d={d:.4f} is {st}")
                if d < band_in and st != "empty":
                    consistent = False
                    notes.append(f"refined fiber near {g0, t0} at d={d:.4f} is {st}")

    n_circ = len(circles)
    # two copies of (torus minus 4 disks) glued along 4 circles
    chi = 2 * (0 - 4) if (n_circ == 4 and consistent) else None
    genus_cover = (2 - chi) // 2 if chi is not None else None
    genus_quot = (2 - chi // 2) // 2 if chi is not None else None
    return TopologyReport(variant, s, grid, counts, n_circ, consistent, False,
                          chi, genus_cover, genus_quot, notes[:20])


# ---------------------------------------------------------------------------
# the circles over the bottom edge
# ---------------------------------------------------------------------------

def eta(s: float, sigma: float, tol: float = 1e-15) -> float:
    """The unique solution of 2 eta = -s cos(sigma + 2 eta).

    The iteration is a contraction with factor |s|; |s| < 1/2 is required.
    """
    if abs(s) >= 0.5:
        raise ValueError("eta requires |s| < 1/2")
    e = -0.5 * s * np.cos(sigma)
    for _ in range(200):
        new = -0.5 * s * np.cos(sigma + 2 * e)
        if abs(new - e) < tol:
            e = new
            break
        e = new
    if abs(2 * e + s * np.cos(sigma + 2 * e)) > 1e-13:
        raise ContinuationError("eta fixed point did not converge")
    return float(e)


def k_circle(variant: str, s: float, sigma: float) -> Rep:
    """The closed-form representation over the bottom edge at angle sigma.

    Both variants have a = f = i, so the image under the base projection is
    the bottom edge; the defining pair vanishes identically in sigma.
    """
    esk = np.array([0.0, 0.0, -np.sin(sigma), np.cos(sigma)])  # e^{sigma i} k
    if variant == BYPASS:
        h = np.array([0.0, 0.0, np.cos(sigma), np.sin(sigma)])  # e^{sigma i} j
        esh = quat.qexp(s * h)
        b = quat.rotate(esh, quat.mul(quat.qexp(-sigma * esk), quat.I))
        p = quat.rotate(esh, quat.qexp(s * np.cos(sigma) * esk))
        return Rep(a=quat.I.copy(), b=b, f=quat.I.copy(), h=h, p=p, q=esh,
                   variant=variant, s=s)
    et = eta(s, sigma)
    rot = quat.qexp(et * esk)
    h = quat.rotate(rot, np.array([0.0, 0.0, np.cos(sigma), np.sin(sigma)]))
    esh = quat.qexp(s * h)
    b = quat.rotate(esh, quat.mul(quat.qexp(-sigma * esk), quat.I))
    p = quat.rotate(esh, quat.qexp(-2 * et * esk))
    return Rep(a=quat.I.copy(), b=b, f=quat.I.copy(), h=h, p=p, q=esh,
               variant=variant, s=s)
