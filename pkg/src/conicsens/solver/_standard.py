"""Reduction of ``min c^T x : G x + s = h, A_eq x = b_eq, s in C`` to full rank.

Equalities are removed by an orthogonal null-space basis and directions in
the null space of ``G`` are split off by an SVD.  A cost component along
such a direction makes the program unbounded as soon as it is feasible.
"""
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from ._hsde import ORTHANT, hsde_solve

RANK_RTOL = 1e-10
#: relative residual below which a linear system counts as consistent
EQ_TOL = 1e-9
#: relative size of a cost component along a free direction that is ignored
NULL_COST_TOL = 1e-8


@dataclass
class StandardResult:
    status: str
    x: np.ndarray = None
    s: np.ndarray = None
    z: np.ndarray = None
    pcost: float = np.nan
    dcost: float = np.nan
    pres: float = np.inf
    dres: float = np.inf
    gap: float = np.inf
    iterations: int = 0
    ray: np.ndarray = None
    certificate: np.ndarray = None
    max_norm: float = 0.0


def _orth_split(M):
    """Return ``(range basis of M^T, null basis of M)`` from one SVD."""
    if M.shape[0] == 0 or M.shape[1] == 0:
        return np.zeros((M.shape[1], 0)), np.eye(M.shape[1])
    _, sv, vt = np.linalg.svd(M)
    tol = RANK_RTOL * max(1.0, sv[0])
    r = int(np.sum(sv > tol))
    return vt[:r].T, vt[r:].T


def solve_standard(c, G, h, cone, A_eq=None, b_eq=None, **settings):
    c = np.asarray(c, dtype=float)
    G = np.asarray(G, dtype=float).reshape(len(h), len(c))
    h = np.asarray(h, dtype=float)
    n = len(c)

    if n == 0:
        return _no_variables(h, cone, b_eq)

    x0 = np.zeros(n)
    N = np.eye(n)
    if A_eq is not None and len(A_eq):
        A_eq = np.asarray(A_eq, dtype=float).reshape(-1, n)
        b_eq = np.asarray(b_eq, dtype=float)
        x0, *_ = np.linalg.lstsq(A_eq, b_eq, rcond=None)
        resid = np.linalg.norm(A_eq @ x0 - b_eq)
        if resid > EQ_TOL * (1.0 + np.linalg.norm(b_eq)):
            return StandardResult("infeasible", pcost=np.inf, dcost=np.inf)
        N = _orth_split(A_eq)[1]

    Gr = G @ N
    hr = h - G @ x0
    cr = N.T @ c
    const = float(c @ x0)
    Vr, V0 = _orth_split(Gr)
    c_null = V0.T @ cr
    free_cost = np.linalg.norm(c_null) > NULL_COST_TOL * (1.0 + np.linalg.norm(c))

    res = hsde_solve(Vr.T @ cr, Gr @ Vr, hr, cone, **settings)
    lift = N @ Vr

    if free_cost:
        # cost decreases along a direction that leaves G x unchanged
        if res.status == "infeasible":
            return StandardResult("infeasible", pcost=np.inf, dcost=np.inf,
                                  iterations=res.iterations, certificate=res.certificate,
                                  z=res.z)
        if res.status == "failure":
            return StandardResult("failure", iterations=res.iterations)
        ray = N @ (V0 @ -c_null)
        ray = ray / -(c @ ray)
        return StandardResult("unbounded", pcost=-np.inf, dcost=-np.inf,
                              iterations=res.iterations, ray=ray)

    out = StandardResult(res.status, pres=res.pres, dres=res.dres, gap=res.gap,
                         iterations=res.iterations, max_norm=res.max_norm,
                         certificate=res.certificate)
    if res.status in ("optimal", "unattained", "failure") and res.x is not None:
        out.x = x0 + lift @ res.x
        out.s = res.s
        out.z = res.z
        out.pcost = res.pcost + const
        out.dcost = res.dcost + const
    elif res.status == "unbounded":
        out.ray = lift @ res.certificate
        out.pcost = out.dcost = -np.inf
    elif res.status == "infeasible":
        out.z = res.z
        out.pcost = out.dcost = np.inf
    return out


def _core_contains(cone, v, tol):
    for kind, sl in cone.slices():
        u = v[sl]
        if kind == ORTHANT:
            if u.size and np.min(u) < -tol:
                return False
        elif u[-1] - np.linalg.norm(u[:-1]) < -tol:
            return False
    return True


def _no_variables(h, cone, b_eq):
    """A program without variables is feasible iff ``h in C`` and ``b_eq = 0``."""
    tol = EQ_TOL * (1.0 + np.linalg.norm(h))
    ok = _core_contains(cone, h, tol)
    if b_eq is not None and np.linalg.norm(b_eq) > EQ_TOL * (1.0 + np.linalg.norm(b_eq)):
        ok = False
    if not ok:
        return StandardResult("infeasible", pcost=np.inf, dcost=np.inf)
    return StandardResult("optimal", x=np.zeros(0), s=h.copy(), z=np.zeros(len(h)),
                          pcost=0.0, dcost=0.0, pres=0.0, dres=0.0, gap=0.0)


def block_diag(*mats):
    return sla.block_diag(*mats) if mats else np.zeros((0, 0))
