"""Homogeneous self-dual interior-point method for orthant/SOC programs.

Solves the standard-form pair

    minimize    c^T x                  maximize   -h^T z
    subject to  G x + s = h,           subject to  G^T z + c = 0,
                s in C                             z in C

where ``C`` is a product of nonnegative orthants and second-order cones
(head coordinate stored *last*).  ``G`` must have full column rank; the
caller is responsible for eliminating free directions first.

The embedding variables are ``(x, s, z, tau, kappa)``; Nesterov-Todd
scaling is used for every block and steps follow Mehrotra's
predictor-corrector rule.
"""
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

ORTHANT = "l"
SOC = "q"


@dataclass(frozen=True)
class CoreCone:
    """Block layout of ``C`` as a tuple of ``(kind, dim)`` pairs."""

    blocks: tuple

    @property
    def dim(self):
        return sum(d for _, d in self.blocks)

    @property
    def degree(self):
        return sum(d if k == ORTHANT else 1 for k, d in self.blocks)

    def slices(self):
        start = 0
        for kind, d in self.blocks:
            yield kind, slice(start, start + d)
            start += d

    def identity(self):
        e = np.zeros(self.dim)
        for kind, sl in self.slices():
            if kind == ORTHANT:
                e[sl] = 1.0
            else:
                e[sl.stop - 1] = 1.0
        return e


@dataclass
class CoreResult:
    status: str  # optimal | infeasible | unbounded | unattained | failure
    x: np.ndarray
    s: np.ndarray
    z: np.ndarray
    pcost: float
    dcost: float
    pres: float
    dres: float
    gap: float
    iterations: int
    certificate: np.ndarray = None
    max_norm: float = 0.0


# -- Jordan algebra helpers --------------------------------------------------

def _soc_det(u):
    nrm = np.linalg.norm(u[:-1])
    return (u[-1] - nrm) * (u[-1] + nrm)


def jordan_prod(cone, u, v):
    out = np.empty_like(u)
    for kind, sl in cone.slices():
        a, b = u[sl], v[sl]
        if kind == ORTHANT:
            out[sl] = a * b
        else:
            out[sl.stop - 1] = a @ b
            out[sl.start:sl.stop - 1] = a[-1] * b[:-1] + b[-1] * a[:-1]
    return out


def jordan_solve(cone, lam, r):
    """Return ``x`` with ``lam o x = r``."""
    out = np.empty_like(r)
    for kind, sl in cone.slices():
        a, b = lam[sl], r[sl]
        if kind == ORTHANT:
            out[sl] = b / a
        else:
            det = _soc_det(a)
            x0 = (a[-1] * b[-1] - a[:-1] @ b[:-1]) / det
            out[sl.stop - 1] = x0
            out[sl.start:sl.stop - 1] = (b[:-1] - x0 * a[:-1]) / a[-1]
    return out


def max_step(cone, u, du):
    """Largest ``alpha >= 0`` keeping ``u + alpha du`` in the cone (inf if none)."""
    alpha = np.inf
    for kind, sl in cone.slices():
        a, d = u[sl], du[sl]
        if kind == ORTHANT:
            neg = d < 0
            if np.any(neg):
                alpha = min(alpha, np.min(-a[neg] / d[neg]))
        else:
            alpha = min(alpha, _soc_step(a, d))
    return alpha


def _soc_step(u, d):
    # det(u + a d) / det(u) = 1 + b a + q a^2; the boundary is hit at its
    # smallest positive root (the head cannot vanish while det > 0).
    det_u = _soc_det(u)
    if det_u <= 0:
        return 0.0
    nu = np.sqrt(det_u)
    u = u / nu
    d = d / nu
    q = d[-1] ** 2 - d[:-1] @ d[:-1]
    b = 2.0 * (u[-1] * d[-1] - u[:-1] @ d[:-1])
    if q == 0.0:
        return -1.0 / b if b < 0 else np.inf
    disc = b * b - 4.0 * q
    if disc < 0:
        return np.inf
    w = -0.5 * (b + np.copysign(np.sqrt(disc), b))
    roots = [r for r in (w / q, 1.0 / w if w != 0 else np.inf) if r > 0]
    return min(roots) if roots else np.inf


class NTScaling:
    """Nesterov-Todd scaling ``W`` (symmetric, block diagonal).

    ``W z = W^{-1} s = lambda``.
    """

    def __init__(self, cone, s, z):
        self.cone = cone
        self.blocks = []
        lam = np.empty_like(s)
        for kind, sl in cone.slices():
            sb, zb = s[sl], z[sl]
            if kind == ORTHANT:
                w = np.sqrt(sb / zb)
                self.blocks.append((kind, sl, w, None))
                lam[sl] = np.sqrt(sb * zb)
            else:
                sdet, zdet = _soc_det(sb), _soc_det(zb)
                sbar = sb / np.sqrt(sdet)
                zbar = zb / np.sqrt(zdet)
                gamma = np.sqrt((1.0 + zbar @ sbar) / 2.0)
                jz = -zbar
                jz[-1] = zbar[-1]
                wbar = (sbar + jz) / (2.0 * gamma)
                beta = (sdet / zdet) ** 0.25
                J = -np.eye(len(sb))
                J[-1, -1] = 1.0
                v = wbar.copy()
                v[-1] += 1.0
                v /= np.sqrt(2.0 * (wbar[-1] + 1.0))
                W = beta * (2.0 * np.outer(v, v) - J)
                jv = J @ v
                Winv = (2.0 * np.outer(jv, jv) - J) / beta
                self.blocks.append((kind, sl, W, Winv))
                lam[sl] = W @ zb
        self.lam = lam

    def apply(self, v, inverse=False):
        out = np.empty_like(v)
        for kind, sl, W, Winv in self.blocks:
            if kind == ORTHANT:
                out[sl] = (v[sl].T / W).T if inverse else (v[sl].T * W).T
            else:
                out[sl] = (Winv if inverse else W) @ v[sl]
        return out


# -- main loop ---------------------------------------------------------------

def hsde_solve(c, G, h, cone, tol_feas=1e-8, tol_gap=1e-8, max_iters=200,
               step_fraction=0.99, unattained_norm=1e6):
    """Run the embedding until a status is certified or ``max_iters`` is hit.

    Returns
    -------
    CoreResult
        Iterates are already divided by ``tau`` for ``optimal`` and
        ``unattained``; for certificates ``certificate`` holds the ray.
    """
    with np.errstate(all="ignore"):
        return _run(np.asarray(c, dtype=float), G, np.asarray(h, dtype=float), cone,
                    tol_feas, tol_gap, max_iters, step_fraction, unattained_norm)


def _run(c, G, h, cone, tol_feas, tol_gap, max_iters, step_fraction,
         unattained_norm):
    G = np.asarray(G, dtype=float).reshape(cone.dim, len(c))
    m, n = G.shape
    e = cone.identity()
    nu = cone.degree

    x = np.zeros(n)
    s = e.copy()
    z = e.copy()
    tau = kappa = 1.0

    resx0 = max(1.0, np.linalg.norm(c))
    resz0 = max(1.0, np.linalg.norm(h))

    loose = 1e3
    best = None
    state = candidate = None
    stall = 0
    for it in range(max_iters + 1):
        rx = G.T @ z + c * tau
        rz = s + G @ x - h * tau
        cx, hz = c @ x, h @ z
        rt = kappa + cx + hz
        mu = (s @ z + tau * kappa) / (nu + 1)

        pres = np.linalg.norm(rz) / tau / resz0
        dres = np.linalg.norm(rx) / tau / resx0
        pcost, dcost = cx / tau, -hz / tau
        gap = (s @ z) / tau ** 2
        scale = 1.0 + abs(pcost)
        norm = max(np.linalg.norm(x), np.linalg.norm(z)) / tau

        if (pres <= tol_feas and dres <= tol_feas and gap <= tol_gap * scale
                and abs(pcost - dcost) <= tol_gap * scale):
            status = "unattained" if norm > unattained_norm else "optimal"
            return CoreResult(status, x / tau, s / tau, z / tau, pcost, dcost,
                              pres, dres, gap, it, max_norm=norm)

        if hz < 0:
            pinf = np.linalg.norm(G.T @ z) / resx0 / (-hz)
            if pinf <= tol_feas:
                cert = z / (-hz)
                return CoreResult("infeasible", x, s, z, np.inf, np.inf, pres, dres,
                                  gap, it, certificate=cert)
        if cx < 0:
            dinf = np.linalg.norm(G @ x + s) / resz0 / (-cx)
            if dinf <= tol_feas:
                cert = x / (-cx)
                return CoreResult("unbounded", x, s, z, -np.inf, -np.inf, pres,
                                  dres, gap, it, certificate=cert)

        state = (x / tau, s / tau, z / tau, pcost, dcost, pres, dres, gap, it,
                 norm)
        merit = max(pres, dres, abs(pcost - dcost) / scale)
        if best is None or merit < best[0]:
            best = (merit, state)
        if norm > unattained_norm and merit <= loose * max(tol_feas, tol_gap):
            candidate = state

        if it == max_iters or stall >= 5:
            break

        try:
            step = _newton_step(c, G, h, cone, x, s, z, tau, kappa, rx, rz, rt, mu,
                                e, step_fraction)
        except (np.linalg.LinAlgError, ValueError, FloatingPointError):
            break
        if step is None:
            break
        dx, ds, dz, dtau, dkappa, alpha = step
        x = x + alpha * dx
        s = s + alpha * ds
        z = z + alpha * dz
        tau = tau + alpha * dtau
        kappa = kappa + alpha * dkappa
        stall = stall + 1 if alpha < 1e-7 else 0
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(z))
                and np.isfinite(tau) and tau > 0):
            break

    if candidate is not None:
        return CoreResult("unattained", *candidate[:-1], max_norm=candidate[-1])
    return _fallback(best, state)


def _fallback(best, state):
    """Report the best iterate of a run that never met a stopping rule."""
    it = state[-2] if state is not None else 0
    if best is None:
        return CoreResult("failure", None, None, None, np.nan, np.nan, np.inf,
                          np.inf, np.inf, it)
    st = best[1]
    return CoreResult("failure", *st[:-2], it, max_norm=st[-1])


def _newton_step(c, G, h, cone, x, s, z, tau, kappa, rx, rz, rt, mu, e, frac):
    W = NTScaling(cone, s, z)
    lam = W.lam
    m, n = G.shape

    Gt = W.apply(G, inverse=True)  # W^{-1} G
    if n:
        R = np.linalg.qr(Gt, mode="r")
        if np.any(~np.isfinite(R)):
            return None
        diag = np.abs(np.diag(R))
        if diag.min() <= 1e-14 * max(1.0, diag.max()):
            R = R + np.diag(np.where(diag <= 1e-14 * max(1.0, diag.max()),
                                     1e-14 * max(1.0, diag.max()), 0.0))

    def kkt_once(r1, r2):
        # [0 G^T; G -W^2][dx; dz] = [r1; r2] via the normal equations
        r2t = W.apply(r2, inverse=True)
        if n:
            rhs = r1 + Gt.T @ r2t
            y = sla.solve_triangular(R, rhs, trans="T")
            dx = sla.solve_triangular(R, y)
        else:
            dx = np.zeros(0)
        dz = W.apply(Gt @ dx - r2t, inverse=True)
        return dx, dz

    def kkt(r1, r2, refine=3):
        dx, dz = kkt_once(r1, r2)
        for _ in range(refine):
            e1 = r1 - G.T @ dz
            e2 = r2 - (G @ dx - W.apply(W.apply(dz)))
            ex, ez = kkt_once(e1, e2)
            dx = dx + ex
            dz = dz + ez
        return dx, dz

    dx2, dz2 = kkt(-c, h)
    denom = c @ dx2 + h @ dz2 - kappa / tau

    def direction(eta, r4, r5):
        q = jordan_solve(cone, lam, r4)
        dx1, dz1 = kkt(-eta * rx, -eta * rz - W.apply(q))
        dtau = (-eta * rt - r5 / tau - c @ dx1 - h @ dz1) / denom
        dx = dx1 + dtau * dx2
        dz = dz1 + dtau * dz2
        # from the linear row, which keeps the residual recursion exact
        ds = -eta * rz - G @ dx + h * dtau
        dkappa = (r5 - kappa * dtau) / tau
        return dx, ds, dz, dtau, dkappa

    def step_length(ds, dz, dtau, dkappa):
        a = min(max_step(cone, s, ds), max_step(cone, z, dz))
        if dtau < 0:
            a = min(a, -tau / dtau)
        if dkappa < 0:
            a = min(a, -kappa / dkappa)
        return a

    # predictor
    r4 = -jordan_prod(cone, lam, lam)
    r5 = -tau * kappa
    dxa, dsa, dza, dtaua, dkappaa = direction(1.0, r4, r5)
    alpha_a = min(1.0, step_length(dsa, dza, dtaua, dkappaa))
    sigma = (1.0 - alpha_a) ** 3

    # combined predictor-corrector
    dst = W.apply(dsa, inverse=True)
    dzt = W.apply(dza)
    r4 = -jordan_prod(cone, lam, lam) + sigma * mu * e - jordan_prod(cone, dst, dzt)
    r5 = -tau * kappa + sigma * mu - dtaua * dkappaa
    dx, ds, dz, dtau, dkappa = direction(1.0 - sigma, r4, r5)
    alpha = min(1.0, frac * step_length(ds, dz, dtau, dkappa))
    return dx, ds, dz, dtau, dkappa, alpha
