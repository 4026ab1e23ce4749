"""Public solver operations on :class:`~conicsens.problem.ConicProgram`.

``solve`` classifies a primal program; ``solve_level_set`` optimises a new
linear objective over the (relaxed) primal or dual solution set; the two
``certify_strict_*`` functions measure how deeply a feasible point can be
pushed into the interior of the cone.
"""
import math
from dataclasses import dataclass, field, replace

import numpy as np

from ..cones import (Orthant, SecondOrder, as_cone, canonical_interior_point,
                     contains, dual)
from ..errors import BarrierUnsupported, DimensionError, NumericalFailure
from ..extreal import INF, NEG_INF, ExtReal
from ..problem import PRIMAL, lower_program
from ._hsde import ORTHANT, SOC, CoreCone
from ._standard import block_diag, solve_standard

OPTIMAL = "Optimal"
PRIMAL_INFEASIBLE = "PrimalInfeasible"
UNBOUNDED = "Unbounded"
UNATTAINED = "NearOptimalUnattained"
FAILURE = "NumericalFailure"

OVER_DUAL = "OverDualSolutions"
OVER_PRIMAL = "OverPrimalSolutions"
MAX = "Max"
MIN = "Min"

#: t_star at or above which strict feasibility is declared
STRICT_THRESHOLD = 1e-6

_STATUS = {"optimal": OPTIMAL, "infeasible": PRIMAL_INFEASIBLE,
           "unbounded": UNBOUNDED, "unattained": UNATTAINED, "failure": FAILURE}


@dataclass(frozen=True)
class SolverSettings:
    """Tolerances shared by every solve.

    ``eps_level`` is the relative level-set slack: the dual level set is
    ``b^T y >= v - eps_level * (1 + |v|)``.
    """

    tol_feas: float = 1e-8
    tol_gap: float = 1e-8
    max_iters: int = 200
    step_fraction: float = 0.99
    unattained_norm: float = 1e6
    eps_level: float = 1e-6

    def core(self):
        return dict(tol_feas=self.tol_feas, tol_gap=self.tol_gap,
                    max_iters=self.max_iters, step_fraction=self.step_fraction,
                    unattained_norm=self.unattained_norm)


DEFAULT_SETTINGS = SolverSettings()


@dataclass
class Solution:
    status: str
    value: ExtReal
    x_opt: np.ndarray = None
    y_opt: np.ndarray = None
    primal_residual: float = math.inf
    dual_residual: float = math.inf
    gap: float = math.inf
    iterations: int = 0
    certificate: np.ndarray = None
    ray: np.ndarray = None
    max_norm: float = 0.0
    notes: dict = field(default_factory=dict)

    @property
    def attained(self):
        return self.status == OPTIMAL

    def to_dict(self):
        def arr(v):
            return None if v is None else [float(e) for e in v]

        return {
            "status": self.status,
            "value": self.value.to_json(),
            "x_opt": arr(self.x_opt),
            "y_opt": arr(self.y_opt),
            "primal_residual": _json_float(self.primal_residual),
            "dual_residual": _json_float(self.dual_residual),
            "gap": _json_float(self.gap),
            "iterations": int(self.iterations),
            "attained": self.attained,
            "certificate": arr(self.certificate),
            "ray": arr(self.ray),
        }


def _json_float(v):
    v = float(v)
    if math.isfinite(v):
        return v
    return "+inf" if v > 0 else ("-inf" if v < 0 else None)


@dataclass
class StrictFeasibilityCertificate:
    """Outcome of ``max t`` pushing a feasible point into the interior.

    ``t_star`` is ``-inf`` when the auxiliary program is infeasible (only
    possible on the dual side, when ``c`` is not in the range of ``A^T``).
    """

    side: str
    t_star: float
    witness: np.ndarray
    interior_direction: np.ndarray
    threshold: float = STRICT_THRESHOLD

    @property
    def strictly_feasible(self):
        return self.t_star >= self.threshold

    def to_dict(self):
        return {
            "side": self.side,
            "t_star": _json_float(self.t_star),
            "strictly_feasible": self.strictly_feasible,
            "witness": None if self.witness is None else [float(v) for v in self.witness],
            "interior_direction": [float(v) for v in self.interior_direction],
        }


# -- helpers -------------------------------------------------------------------

def core_cone(K):
    K = as_cone(K)
    blocks = []
    for blk in K.blocks:
        if isinstance(blk, Orthant):
            blocks.append((ORTHANT, blk.dim))
        elif isinstance(blk, SecondOrder):
            blocks.append((SOC, blk.dim))
        else:
            raise BarrierUnsupported(
                f"{type(blk).__name__} blocks must be reduced before solving")
    return CoreCone(tuple(blocks))


def _append_orthant(cc, k=1):
    return CoreCone(cc.blocks + ((ORTHANT, k),))


def _from_standard(res, value_sign=1.0, x=None, y=None):
    """Build a Solution from a standard-form result (minimisation)."""
    status = _STATUS[res.status]
    if status == PRIMAL_INFEASIBLE:
        value = INF if value_sign > 0 else NEG_INF
    elif status == UNBOUNDED:
        value = NEG_INF if value_sign > 0 else INF
    elif status in (OPTIMAL, UNATTAINED):
        value = ExtReal.finite(value_sign * res.pcost)
    else:
        value = ExtReal(value_sign * res.pcost) if np.isfinite(res.pcost) else INF
    return Solution(status, value, x_opt=x, y_opt=y, primal_residual=res.pres,
                    dual_residual=res.dres, gap=res.gap, iterations=res.iterations,
                    max_norm=res.max_norm)


# -- solve ---------------------------------------------------------------------

def solve(P, settings=DEFAULT_SETTINGS):
    """Solve ``min{c^T x : A x - b in K}`` for an orthant/SOC cone.

    The returned :class:`Solution` carries ``x_opt``/``y_opt`` when optimal,
    a dual ray ``certificate`` (``A^T y = 0``, ``b^T y > 0``, ``y in K*``)
    when infeasible and a primal ``ray`` (``A r in K``, ``c^T r < 0``) when
    unbounded.

    Raises
    ------
    BarrierUnsupported
        If ``K`` still has polyhedral or generated blocks.
    """
    if P.form != PRIMAL:
        raise ValueError("solve expects a primal-form program")
    cc = core_cone(P.K)
    res = solve_standard(P.c, -P.A, -P.b, cc, **settings.core())
    if res.status in ("optimal", "unattained"):
        sol = _from_standard(res, x=res.x, y=res.z)
    else:
        sol = _from_standard(res)
    if res.status == "infeasible" and res.certificate is not None:
        y = res.certificate
        sol.certificate = y / (P.b @ y) if P.b @ y > 0 else y
    elif res.status == "unbounded":
        sol.ray = res.ray
    elif res.status == "failure":
        sol.x_opt, sol.y_opt = res.x, res.z
    return sol


def solve_any(P, settings=DEFAULT_SETTINGS):
    """Solve after lowering polyhedral blocks; dual vectors mapped back to ``R^m``."""
    P2, M = lower_program(P)
    sol = solve(P2, settings)
    if P2 is not P:
        if sol.y_opt is not None:
            sol.y_opt = M.T @ sol.y_opt
        if sol.certificate is not None:
            sol.certificate = M.T @ sol.certificate
    return sol


def require(sol):
    if sol.status == FAILURE:
        raise NumericalFailure(
            f"solver failed after {sol.iterations} iterations "
            f"(primal residual {sol.primal_residual:.2e}, dual residual {sol.dual_residual:.2e})")
    return sol


# -- face classification -------------------------------------------------------

_RATIO = 1e-3
_NONZERO = 1e-4


def _classify(K, v, other):
    """Smallest face of ``K`` that provably holds the limit of ``v``.

    ``v`` and ``other`` are a complementary pair of near-optimal cone
    vectors.  Returns one entry per scalar coordinate of orthant blocks and
    one per SOC block: ``"zero"``, ``("ray", r)`` or ``None`` (no claim).
    """
    vn = v / (1.0 + np.max(np.abs(v)))
    on = other / (1.0 + np.max(np.abs(other)))
    faces = []
    for blk, sl in K.slices():
        a, b = vn[sl], on[sl]
        if isinstance(blk, Orthant):
            for ai, bi in zip(a, b):
                faces.append("zero" if ai <= _RATIO * bi else None)
            continue
        a_marg = a[-1] - np.linalg.norm(a[:-1])
        b_marg = b[-1] - np.linalg.norm(b[:-1])
        a_norm = np.linalg.norm(a)
        if b_marg > 0 and a_norm <= _RATIO * b_marg:
            faces.append("zero")
        elif a_norm >= _NONZERO and a_marg <= _RATIO * a_norm and np.linalg.norm(a[:-1]) > 0:
            tail = v[sl][:-1]
            r = np.append(tail / np.linalg.norm(tail), 1.0)
            faces.append(("ray", r))
        else:
            faces.append(None)
    return faces


def _face_map(K, faces):
    """Matrix ``T`` and cone of ``u`` with ``v = T u`` on the selected face."""
    cols, blocks = [], []
    it = iter(faces)
    m = K.dim
    for blk, sl in K.slices():
        if isinstance(blk, Orthant):
            keep = [i for i in range(sl.start, sl.stop) if next(it) != "zero"]
            for i in keep:
                e = np.zeros(m)
                e[i] = 1.0
                cols.append(e)
            if keep:
                blocks.append((ORTHANT, len(keep)))
            continue
        face = next(it)
        if face == "zero":
            continue
        if face is None:
            for i in range(sl.start, sl.stop):
                e = np.zeros(m)
                e[i] = 1.0
                cols.append(e)
            blocks.append((SOC, blk.dim))
        else:
            e = np.zeros(m)
            e[sl] = face[1]
            cols.append(e)
            blocks.append((ORTHANT, 1))
    T = np.array(cols).T if cols else np.zeros((m, 0))
    merged = []
    for kind, d in blocks:
        if kind == ORTHANT and merged and merged[-1][0] == ORTHANT:
            merged[-1] = (ORTHANT, merged[-1][1] + d)
        else:
            merged.append((kind, d))
    return T, CoreCone(tuple(merged))


# -- level sets ------------------------------------------------------------------

def solve_level_set(P, side, w, sense=MAX, base=None, eps_level=None,
                    settings=DEFAULT_SETTINGS, use_faces=True):
    """Optimise ``w`` over the relaxed dual or primal solution set of ``P``.

    ``OverDualSolutions``: ``{y : A^T y = c, y in K*, b^T y >= v - eps}``;
    ``OverPrimalSolutions``: ``{x : A x - b in K, c^T x <= v + eps}``, with
    ``eps = eps_level * (1 + |v|)``.  Passing ``eps_level=inf`` drops the
    level constraint (plain feasibility).

    Solution sets of second-order blocks are tangent to the level
    hyperplane, so the relaxation alone costs ``O(sqrt(eps))``.  When the
    base solution identifies the face of the cone holding every optimum, the
    level set is intersected with that face first (it contains the whole
    solution set); if that restricted program fails, the plain relaxation
    is solved instead.

    Returns
    -------
    Solution
        ``value`` is ``sup``/``inf`` of ``w`` (``-inf``/``+inf`` for an
        empty set, ``+inf``/``-inf`` for an unbounded one); ``x_opt`` holds
        the maximiser/minimiser in the original space.
    """
    if P.form != PRIMAL:
        raise ValueError("solve_level_set expects a primal-form program")
    P2, M = lower_program(P)
    w = np.asarray(w, dtype=float)
    if side == OVER_DUAL:
        if w.shape != (P.m,):
            raise DimensionError(f"dual objective needs length {P.m}, got {w.shape}")
        w2 = M @ w if P2 is not P else w
    elif side == OVER_PRIMAL:
        if w.shape != (P.n,):
            raise DimensionError(f"primal objective needs length {P.n}, got {w.shape}")
        w2 = w
    else:
        raise ValueError(f"unknown level-set side {side!r}")
    if sense not in (MAX, MIN):
        raise ValueError(f"unknown sense {sense!r}")
    eps_rel = settings.eps_level if eps_level is None else eps_level

    plain = math.isinf(eps_rel)
    if not plain:
        if base is None:
            base = require(solve(P2, settings))
        elif P2 is not P and base.y_opt is not None and len(base.y_opt) != P2.m:
            base = require(solve(P2, settings))
        if base.status not in (OPTIMAL, UNATTAINED) or not base.value.is_finite:
            raise ValueError("level sets need a finite base optimum")
    sol = _level(P2, side, w2, sense, base, eps_rel, settings, use_faces and not plain)
    if side == OVER_DUAL and P2 is not P and sol.x_opt is not None:
        sol.x_opt = M.T @ sol.x_opt
    return sol


def _level(P, side, w, sense, base, eps_rel, settings, use_faces):
    sign = 1.0 if sense == MIN else -1.0  # minimise sign * w^T v
    cc = core_cone(P.K)
    faces = None
    if use_faces and base is not None and base.x_opt is not None and base.y_opt is not None:
        s_opt = P.A @ base.x_opt - P.b
        if side == OVER_DUAL:
            faces = _classify(P.K, base.y_opt, s_opt)
        else:
            faces = _classify(P.K, s_opt, base.y_opt)
        if all(f is None for f in faces):
            faces = None
    if faces is not None:
        sol = _level_program(P, side, w, sign, base, eps_rel, settings, cc, faces)
        if sol.status in (OPTIMAL, UNATTAINED):
            sol.notes["face_restricted"] = True
            return sol
    sol = _level_program(P, side, w, sign, base, eps_rel, settings, cc, None)
    sol.notes["face_restricted"] = False
    return sol


def _level_program(P, side, w, sign, base, eps_rel, settings, cc, faces):
    m, n = P.m, P.n
    plain = math.isinf(eps_rel)
    if not plain:
        v = float(base.value)
        eps = eps_rel * (1.0 + abs(v))

    if side == OVER_DUAL:
        # variables u with y = T u
        if faces is None:
            T, cone_u = np.eye(m), cc
        else:
            T, cone_u = _face_map(P.K, faces)
        k = T.shape[1]
        G = -np.eye(k)
        h = np.zeros(k)
        if not plain:
            G = np.vstack([G, -(P.b @ T)[None, :]])
            h = np.append(h, -(v - eps))
            cone_u = _append_orthant(cone_u)
        res = solve_standard(sign * (T.T @ w), G, h, cone_u, A_eq=P.A.T @ T, b_eq=P.c,
                             **settings.core())
        sol = _from_standard(res, value_sign=sign)
        if res.x is not None and res.status in ("optimal", "unattained"):
            sol.x_opt = T @ res.x
        return sol

    # OVER_PRIMAL: variables (x, alpha) with one alpha per ray face
    if faces is None:
        G = -P.A
        h = -P.b
        cone_s = cc
        A_eq = b_eq = None
        nvar = n
    else:
        G_rows, h_rows, eq_rows, eq_rhs, blocks, ray_cols = [], [], [], [], [], []
        it = iter(faces)
        for blk, sl in P.K.slices():
            if isinstance(blk, Orthant):
                for i in range(sl.start, sl.stop):
                    if next(it) == "zero":
                        eq_rows.append((P.A[i], None))
                        eq_rhs.append(P.b[i])
                    else:
                        G_rows.append(-P.A[i])
                        h_rows.append(-P.b[i])
                        blocks.append((ORTHANT, 1))
                continue
            face = next(it)
            if face is None:
                G_rows.extend(-P.A[sl])
                h_rows.extend(-P.b[sl])
                blocks.append((SOC, blk.dim))
            elif face == "zero":
                for i in range(sl.start, sl.stop):
                    eq_rows.append((P.A[i], None))
                    eq_rhs.append(P.b[i])
            else:
                j = len(ray_cols)
                ray_cols.append(j)
                for r_i, i in zip(face[1], range(sl.start, sl.stop)):
                    eq_rows.append((P.A[i], (j, -r_i)))
                    eq_rhs.append(P.b[i])
        na = len(ray_cols)
        nvar = n + na
        G = np.array([np.append(g, np.zeros(na)) for g in G_rows]).reshape(-1, nvar)
        h = np.array(h_rows, dtype=float)
        for j in range(na):
            row = np.zeros(nvar)
            row[n + j] = -1.0
            G = np.vstack([G, row])
            h = np.append(h, 0.0)
            blocks.append((ORTHANT, 1))
        A_eq = np.zeros((len(eq_rows), nvar))
        for r, (a, extra) in enumerate(eq_rows):
            A_eq[r, :n] = a
            if extra is not None:
                A_eq[r, n + extra[0]] = extra[1]
        b_eq = np.array(eq_rhs, dtype=float)
        cone_s = CoreCone(tuple(blocks))
    if not plain:
        row = np.zeros(nvar)
        row[:n] = P.c
        G = np.vstack([G, row])
        h = np.append(h, v + eps)
        cone_s = _append_orthant(cone_s)
    if not cone_s.blocks:
        cone_s = CoreCone(((ORTHANT, 0),))
    obj = np.zeros(nvar)
    obj[:n] = sign * w
    res = solve_standard(obj, G, h, cone_s, A_eq=A_eq, b_eq=b_eq, **settings.core())
    sol = _from_standard(res, value_sign=sign)
    if res.x is not None and res.status in ("optimal", "unattained"):
        sol.x_opt = res.x[:n]
    return sol


# -- strict feasibility ----------------------------------------------------------

def certify_strict_primal(P, settings=DEFAULT_SETTINGS):
    """Solve ``max{t : A x - b - t u in K, t <= 1}`` with ``u`` canonical.

    Raises
    ------
    EmptyInterior
        If ``K`` has no interior point.
    """
    u = canonical_interior_point(P.K)
    P2, M = lower_program(P)
    u2 = M @ u
    cc = _append_orthant(core_cone(P2.K))
    n = P.n
    G = np.vstack([np.hstack([-P2.A, u2[:, None]]), np.append(np.zeros(n), 1.0)])
    h = np.append(-P2.b, 1.0)
    obj = np.zeros(n + 1)
    obj[-1] = -1.0
    res = solve_standard(obj, G, h, cc, **settings.core())
    if res.status not in ("optimal", "unattained"):
        raise NumericalFailure(f"primal strict-feasibility program ended with {res.status}")
    return StrictFeasibilityCertificate("Primal", float(res.x[-1]), res.x[:n], u)


def certify_strict_dual(P, settings=DEFAULT_SETTINGS):
    """Solve ``max{t : A^T y = c, y - t u* in K*, t <= 1}``.

    Polyhedral cones are handled through their lowered orthant form, where
    ``y = B^T z`` and ``u* = B^T 1`` (the sum of the generators of ``K*``).
    """
    P2, M = lower_program(P)
    u2 = canonical_interior_point(dual(P2.K))
    u = M.T @ u2
    m2 = P2.m
    cc = _append_orthant(core_cone(dual(P2.K)))
    G = np.vstack([np.hstack([-np.eye(m2), u2[:, None]]), np.append(np.zeros(m2), 1.0)])
    h = np.append(np.zeros(m2), 1.0)
    obj = np.zeros(m2 + 1)
    obj[-1] = -1.0
    A_eq = np.hstack([P2.A.T, np.zeros((P.n, 1))])
    res = solve_standard(obj, G, h, cc, A_eq=A_eq, b_eq=P2.c, **settings.core())
    if res.status == "infeasible":
        return StrictFeasibilityCertificate("Dual", -math.inf, None, u)
    if res.status not in ("optimal", "unattained"):
        raise NumericalFailure(f"dual strict-feasibility program ended with {res.status}")
    return StrictFeasibilityCertificate("Dual", float(res.x[-1]), M.T @ res.x[:m2], u)


def verify_certificate(P, cert, tol=1e-6):
    """Re-check a strict-feasibility certificate against cone membership."""
    if cert.witness is None or not cert.t_star > 0:
        return False
    if cert.side == "Primal":
        return contains(P.K, P.A @ cert.witness - P.b - cert.t_star * cert.interior_direction, tol)
    y = cert.witness
    eq = np.linalg.norm(P.A.T @ y - P.c) <= tol * (1.0 + np.linalg.norm(P.c))
    return bool(eq) and contains(dual(P.K), y - cert.t_star * cert.interior_direction, tol)


def with_settings(settings=None, **overrides):
    base = settings or DEFAULT_SETTINGS
    return replace(base, **{k: v for k, v in overrides.items() if v is not None})


__all__ = [
    "OPTIMAL", "PRIMAL_INFEASIBLE", "UNBOUNDED", "UNATTAINED", "FAILURE",
    "OVER_DUAL", "OVER_PRIMAL", "MAX", "MIN", "STRICT_THRESHOLD",
    "SolverSettings", "DEFAULT_SETTINGS", "Solution", "StrictFeasibilityCertificate",
    "solve", "solve_any", "solve_level_set", "certify_strict_primal",
    "certify_strict_dual", "verify_certificate", "require", "with_settings",
    "block_diag",
]
