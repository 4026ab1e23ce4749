"""Optimal value functions and their first-order sensitivity.

``phi(b) = inf{c^T x : A x - b in K}`` is convex in the right-hand side and
``psi(c)`` (same program, cost varied) is concave in the cost.  The
functions here evaluate both, compute their directional derivatives from
dual/primal solution sets, bracket finite increments and probe the
qualitative statements (finiteness near ``b``, bounded dual solution sets)
numerically.

Every operation whose formula needs a regularity assumption checks it first
and raises :class:`~conicsens.errors.HypothesisViolation` naming it.
"""
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .cones import Orthant, PolyhedralH, contains, dual, interior_margin
from .errors import (DimensionError, HypothesisViolation, NotPolyhedral, NumericalFailure,
                     RangeTestFailed)
from .extreal import INF, NEG_INF, ExtReal
from .problem import RHS, Perturbation, lower_program, perturb
from .solver import (DEFAULT_SETTINGS, FAILURE, MAX, MIN, OPTIMAL, OVER_DUAL, OVER_PRIMAL,
                     PRIMAL_INFEASIBLE, certify_strict_dual,
                     certify_strict_primal, require, solve, solve_any,
                     solve_level_set)

PRIMAL_STRICT = "primal_strict_feasibility"
DUAL_STRICT = "dual_strict_feasibility"
FINITE_VALUE = "finite_value"
HAS_SOLUTION = "has_solution"

#: residual (relative to ``1 + ||h||``) below which ``h`` is in range(A^T)
RANGE_TOL = 1e-8
#: tolerance of the exactness test in the horizon search, relative to 1 + |v|
EXACT_TOL = 1e-6
TAU_GRID = tuple(2.0 ** -k for k in range(21))
BISECTION_STEPS = 8
#: derivative-type computations run at this fraction of the user tolerances
TIGHTEN = 1e-3
DEFAULT_SEED = 42


def tightened(settings):
    """Settings for slopes and difference quotients.

    A slope is read off a dual or primal optimum, and a quotient divides
    value errors by ``t``; both magnify solver error, so they are computed
    with tolerances a factor ``TIGHTEN`` below the ones used for values.
    """
    return replace(settings, tol_feas=settings.tol_feas * TIGHTEN,
                   tol_gap=settings.tol_gap * TIGHTEN)


FD_SETTINGS = tightened(DEFAULT_SETTINGS)


# -- value functions ---------------------------------------------------------------

def _value(P, settings):
    return require(solve_any(P, settings)).value


def phi(P, b_new, settings=DEFAULT_SETTINGS):
    """Optimal value with the right-hand side replaced by ``b_new``.

    ``+inf`` when the program becomes infeasible, ``-inf`` when unbounded.

    Examples
    --------
    >>> from conicsens.cones import Cone, Orthant
    >>> from conicsens.problem import ConicProgram
    >>> P = ConicProgram([[1, 0], [0, 1]], [1, 2], [1, 1], Cone((Orthant(2),)))
    >>> round(float(phi(P, [1, 2])), 6)
    3.0
    """
    return _value(P.replace(b=np.asarray(b_new, dtype=float)), settings)


def psi(P, c_new, settings=DEFAULT_SETTINGS):
    """Optimal value with the cost vector replaced by ``c_new``."""
    return _value(P.replace(c=np.asarray(c_new, dtype=float)), settings)


# -- hypothesis gates --------------------------------------------------------------

@dataclass
class Hypotheses:
    """Which regularity conditions were checked and their certified margins."""

    primal_strict: bool = None
    dual_strict: bool = None
    primal_margin: float = None
    dual_margin: float = None

    def to_dict(self):
        def num(v):
            if v is None:
                return None
            return v if math.isfinite(v) else ("+inf" if v > 0 else "-inf")

        return {"primal_strict": self.primal_strict, "dual_strict": self.dual_strict,
                "margins": {"primal": num(self.primal_margin), "dual": num(self.dual_margin)}}


def _primal_gate(P, settings, hyp=None):
    cert = certify_strict_primal(P, settings)
    if hyp is not None:
        hyp.primal_strict = cert.strictly_feasible
        hyp.primal_margin = cert.t_star
    if not cert.strictly_feasible:
        raise HypothesisViolation(
            PRIMAL_STRICT, f"no point with A x - b in int K (t* = {cert.t_star:.3e})")
    return cert


def _dual_gate(P, settings, hyp=None):
    cert = certify_strict_dual(P, settings)
    if hyp is not None:
        hyp.dual_strict = cert.strictly_feasible
        hyp.dual_margin = cert.t_star
    if not cert.strictly_feasible:
        raise HypothesisViolation(
            DUAL_STRICT, f"no y with A^T y = c and y in int K* (t* = {cert.t_star:.3e})")
    return cert


def _finite_base(P, settings):
    sol = require(solve_any(P, settings))
    if not sol.value.is_finite:
        raise HypothesisViolation(FINITE_VALUE, f"optimal value is {sol.value.to_json()}")
    return sol


def _solved(P, settings):
    sol = _finite_base(P, settings)
    if sol.status != OPTIMAL:
        raise HypothesisViolation(HAS_SOLUTION, "the optimal value is not attained")
    return sol


def _with_fallback(fn, settings):
    """Run ``fn`` at tightened tolerances, retrying at ``settings`` on failure."""
    sol = fn(tightened(settings))
    if sol.status == FAILURE:
        sol = fn(settings)
    return require(sol)


def _base_for_levels(P, settings):
    """Solve the lowered program, whose iterates the level-set solver reuses."""
    P2, _ = lower_program(P)
    return _with_fallback(lambda st: solve(P2, st), settings)


def in_range(A, h, tol=RANGE_TOL):
    """Least-squares test ``h in range(A^T)``; returns ``(bool, residual)``."""
    h = np.asarray(h, dtype=float)
    v, *_ = np.linalg.lstsq(A.T, h, rcond=None)
    resid = float(np.linalg.norm(A.T @ v - h))
    return resid <= tol * (1.0 + np.linalg.norm(h)), resid


def _check_polyhedral(P):
    for blk in P.K.blocks:
        if not isinstance(blk, (Orthant, PolyhedralH)):
            raise NotPolyhedral(f"{type(blk).__name__} block in a polyhedral-only operation")


def _direction(v, size, name):
    v = np.asarray(v, dtype=float)
    if v.shape != (size,):
        raise DimensionError(f"{name} must have length {size}, got shape {v.shape}")
    return v


# -- support values over solution / feasible sets ------------------------------------

@dataclass
class SupportValue:
    """Extremal value of a linear form over a set and whether it was attained."""

    value: ExtReal
    attained: bool
    point: np.ndarray = None


def _support(P, side, w, sense, base, eps_level, settings):
    w = np.asarray(w, dtype=float)
    if not np.any(w):
        return SupportValue(ExtReal(0.0), True, None)
    sol = _with_fallback(lambda st: solve_level_set(P, side, w, sense, base=base,
                                                    eps_level=eps_level, settings=st),
                         settings)
    return SupportValue(sol.value, sol.status == OPTIMAL, sol.x_opt)


def sup_over_dual_solutions(P, d, base=None, settings=DEFAULT_SETTINGS):
    """``sup{d^T y : y in S(D)}`` through the level-set solver."""
    base = base or _base_for_levels(P, settings)
    return _support(P, OVER_DUAL, d, MAX, base, None, settings)


def sup_over_dual_feasible(P, d, settings=DEFAULT_SETTINGS):
    """``sup{d^T y : y in F(D)}``; may be unattained or ``+inf``."""
    return _support(P, OVER_DUAL, d, MAX, None, math.inf, settings)


def inf_over_primal_solutions(P, h, base=None, settings=DEFAULT_SETTINGS):
    base = base or _base_for_levels(P, settings)
    if base.status != OPTIMAL:
        # S(P) is empty and inf over the empty set is +inf
        return SupportValue(INF, False, None)
    return _support(P, OVER_PRIMAL, h, MIN, base, None, settings)


def inf_over_primal_feasible(P, h, settings=DEFAULT_SETTINGS):
    return _support(P, OVER_PRIMAL, h, MIN, None, math.inf, settings)


# -- phi ---------------------------------------------------------------------------

def phi_dir_deriv(P, d, settings=DEFAULT_SETTINGS):
    """Directional derivative ``phi'(b; d) = max{d^T y : y in S(D)}``.

    Needs a strictly feasible primal that has an optimal solution; the dual
    solution set is then nonempty and compact, so the value is finite.
    """
    d = _direction(d, P.m, "d")
    _primal_gate(P, settings)
    _solved(P, settings)
    return sup_over_dual_solutions(P, d, settings=settings).value


def phi_subdiff_contains(P, p, tol=1e-6, settings=DEFAULT_SETTINGS):
    """Membership of ``p`` in the subdifferential of ``phi`` at ``b``.

    Under the hypotheses of :func:`phi_dir_deriv` the subdifferential is the
    dual solution set, so the test is dual feasibility plus ``b^T p = v``.
    """
    p = _direction(p, P.m, "p")
    _primal_gate(P, settings)
    v = float(_solved(P, settings).value)
    if not contains(dual(P.K), p, tol):
        return False
    if np.linalg.norm(P.A.T @ p - P.c) > tol * (1.0 + np.linalg.norm(P.c)):
        return False
    return abs(P.b @ p - v) <= tol * (1.0 + abs(v))


@dataclass
class IncrementBounds:
    lower: ExtReal
    upper: ExtReal
    upper_valid: bool
    lower_slope: ExtReal
    upper_slope: ExtReal
    upper_attained: bool

    def to_dict(self):
        return {"lower": self.lower.to_json(), "upper": self.upper.to_json(),
                "upper_valid": self.upper_valid, "lower_slope": self.lower_slope.to_json(),
                "upper_slope": self.upper_slope.to_json(),
                "upper_attained": self.upper_attained}


def _witness_survives(P, x0, d, t):
    """Does ``A x0 - (b + t d)`` stay strictly inside ``K``?"""
    P2, M = lower_program(P)
    slack = P2.A @ x0 - P2.b - t * (M @ d)
    return interior_margin(P2.K, slack) > 0


def phi_increment_bounds(P, d, t, settings=DEFAULT_SETTINGS):
    """Two-sided estimate of ``phi(b + t d)``.

    ``lower = v + t sup{d^T y : y in S(D)}`` and
    ``upper = v + t sup{d^T y : y in F(D)}``.  The lower bound holds for all
    ``t > 0``; the upper one up to a horizon, and ``upper_valid`` reports the
    sufficient check that the strict primal witness is still strictly
    feasible for ``b + t d``.
    """
    d = _direction(d, P.m, "d")
    t = float(t)
    if not t > 0:
        raise ValueError(f"step must be positive, got {t}")
    cert = _primal_gate(P, settings)
    sol = _finite_base(P, settings)
    v = sol.value
    if sol.status == OPTIMAL:
        lo = sup_over_dual_solutions(P, d, settings=settings).value
    else:
        # S(D) stays nonempty under strict primal feasibility; rebuild from the value
        lo = sup_over_dual_solutions(P, d, base=_base_for_levels(P, settings),
                                     settings=settings).value
    up = sup_over_dual_feasible(P, d, settings)
    return IncrementBounds(v + t * lo, v + t * up.value,
                           _witness_survives(P, cert.witness, d, t), lo, up.value,
                           up.attained)


def _horizon(residual, grid=TAU_GRID, steps=BISECTION_STEPS):
    """Largest ``t`` with ``residual(t)`` true, scanning ``grid`` downwards.

    The gap between a convex value function and its tangent line is convex,
    nonnegative and zero at ``t = 0``, so the set where it stays below a
    tolerance is an interval starting at zero.  Scanning from the largest
    grid value and stopping at the first pass therefore finds the same grid
    point as checking every smaller one.  Bisection then refines between the
    passing point and its failing neighbour.
    """
    prev_fail = None
    for g in grid:
        if residual(g):
            lo = g
            break
        prev_fail = g
    else:
        return 0.0
    if prev_fail is None:
        return lo
    hi = prev_fail
    for _ in range(steps):
        mid = 0.5 * (lo + hi)
        if residual(mid):
            lo = mid
        else:
            hi = mid
    return lo


def _matches(value, predicted, v, tol=EXACT_TOL):
    if not predicted.is_finite or not value.is_finite:
        return value.tag == predicted.tag
    return abs(float(value) - float(predicted)) <= tol * (1.0 + abs(v))


def _safe(fn):
    try:
        return fn()
    except NumericalFailure:
        return None


def phi_increment_exact_polyhedral(P, d, settings=DEFAULT_SETTINGS):
    """Exact first-order increment of ``phi`` for polyhedral cones.

    Returns ``(slope, tau)`` with ``phi(b + t d) = v + t slope`` verified on
    ``(0, tau]``; ``slope`` is the support value of ``d`` over ``S(D)``,
    computed on the equivalent orthant program.
    """
    _check_polyhedral(P)
    d = _direction(d, P.m, "d")
    base = _finite_base(P, settings)
    v = float(base.value)
    slope = sup_over_dual_solutions(P, d, settings=settings).value
    if not np.any(d):
        return slope, TAU_GRID[0]
    pert = Perturbation.rhs(d)

    def ok(t):
        val = _safe(lambda: _value(perturb(P, pert.at(t)), settings))
        return val is not None and _matches(val, ExtReal(v) + t * slope, v)

    return slope, _horizon(ok)


# -- psi ---------------------------------------------------------------------------

def psi_dir_deriv(P, h, settings=DEFAULT_SETTINGS):
    """``psi'(c; h)``: ``inf{h^T x : x in S(P)}`` on range(A^T), ``-inf`` off it.

    Requires both the primal and the dual to be strictly feasible.
    """
    h = _direction(h, P.n, "h")
    _primal_gate(P, settings)
    _dual_gate(P, settings)
    ok, _ = in_range(P.A, h)
    if not ok:
        return NEG_INF
    return inf_over_primal_solutions(P, h, settings=settings).value


def psi_increment_bounds(P, h, t, settings=DEFAULT_SETTINGS):
    """``(lower, upper)`` for ``psi(c + t h)``, valid for every ``t > 0``.

    ``lower = v + t inf{h^T x : x in F(P)}``,
    ``upper = v + t inf{h^T x : x in S(P)}``.
    """
    h = _direction(h, P.n, "h")
    t = float(t)
    if not t > 0:
        raise ValueError(f"step must be positive, got {t}")
    v = _finite_base(P, settings).value
    lo = inf_over_primal_feasible(P, h, settings).value
    up = inf_over_primal_solutions(P, h, settings=settings).value
    return v + t * lo, v + t * up


def psi_increment_exact_polyhedral(P, h, settings=DEFAULT_SETTINGS):
    """Exact first-order increment of ``psi`` for polyhedral cones.

    Hypotheses: ``h`` in range(A^T), a strictly feasible dual and a feasible
    primal.  Returns ``(slope, tau)`` as for the right-hand side version.
    """
    _check_polyhedral(P)
    h = _direction(h, P.n, "h")
    ok, resid = in_range(P.A, h)
    if not ok:
        raise RangeTestFailed(resid)
    _dual_gate(P, settings)
    base = require(solve_any(P, settings))
    if base.status == PRIMAL_INFEASIBLE:
        raise HypothesisViolation(FINITE_VALUE, "the primal program is infeasible")
    if not base.value.is_finite:
        raise HypothesisViolation(FINITE_VALUE, f"optimal value is {base.value.to_json()}")
    v = float(base.value)
    slope = inf_over_primal_solutions(P, h, settings=settings).value
    if not np.any(h):
        return slope, TAU_GRID[0]
    pert = Perturbation.obj(h)

    def ok_at(t):
        val = _safe(lambda: _value(perturb(P, pert.at(t)), settings))
        return val is not None and _matches(val, ExtReal(v) + t * slope, v)

    return slope, _horizon(ok_at)


# -- finite differences --------------------------------------------------------------

@dataclass
class FDTable:
    """Difference quotients ``(value(t) - value(0)) / t`` along a schedule."""

    kind: str
    rows: list = field(default_factory=list)

    def quotients(self):
        return [q for _, q in self.rows]

    def monotone(self, tol=1e-6):
        """Nonincreasing as ``t`` shrinks for ``phi``, nondecreasing for ``psi``.

        Infinite quotients compare in the extended order, so ``+inf``
        followed by a finite quotient is monotone for ``phi``.
        """
        sign = 1.0 if self.kind == RHS else -1.0
        qs = [sign * float(q) for q in self.quotients()]
        for a, b in zip(qs, qs[1:]):
            if a == math.inf or b == -math.inf:
                continue
            if b - a > tol * (1.0 + abs(a)):
                return False
        return True

    def to_list(self):
        return [[t, q.to_json()] for t, q in self.rows]


def _schedule(ts):
    ts = [float(t) for t in ts]
    if not ts:
        raise ValueError("empty step schedule")
    if any(not t > 0 or not math.isfinite(t) for t in ts):
        raise ValueError("steps must be finite positive numbers")
    if any(b >= a for a, b in zip(ts, ts[1:])):
        raise ValueError("steps must be strictly decreasing")
    return ts


def fd_verify(P, pert, t_schedule, settings=FD_SETTINGS):
    """Tabulate difference quotients of ``phi`` or ``psi`` along ``pert``.

    Values are computed with tighter tolerances than the defaults because
    the quotient magnifies solver error by ``1/t``.  Infinite values are
    recorded in the table rather than raised.
    """
    ts = _schedule(t_schedule)
    v0 = _value(P, settings)
    if not v0.is_finite:
        raise HypothesisViolation(FINITE_VALUE, f"base value is {v0.to_json()}")
    table = FDTable(pert.kind)
    for t in ts:
        vt = _value(perturb(P, pert.at(t)), settings)
        table.rows.append((t, (vt - float(v0)) * (1.0 / t)))
    return table


# -- probes -----------------------------------------------------------------------

@dataclass
class LipschitzProbe:
    finite_everywhere: bool
    modulus_estimate: float
    radius: float
    pairs: int

    def to_dict(self):
        return {"finite_everywhere": self.finite_everywhere,
                "modulus_estimate": self.modulus_estimate, "radius": self.radius,
                "pairs": self.pairs}


def certified_radius(P, cert):
    """Half the distance by which the strict witness clears the boundary of ``K``.

    Inside that ball around ``b`` the witness stays strictly feasible, so
    ``phi`` is finite there.
    """
    P2, M = lower_program(P)
    margin = interior_margin(P2.K, P2.A @ cert.witness - P2.b)
    return 0.5 * margin / max(1.0, np.linalg.norm(M, 2))


def _ball(rng, m, r):
    u = rng.standard_normal(m)
    u /= np.linalg.norm(u)
    return r * rng.uniform() ** (1.0 / m) * u


def lipschitz_probe(P, radius, sample_count=50, seed=DEFAULT_SEED,
                    settings=DEFAULT_SETTINGS):
    """Sample ``phi`` near ``b`` and estimate its Lipschitz modulus.

    Each pair starts at a uniform point ``b1`` of the ball of radius
    ``radius / 2`` and moves a distance ``radius / 2`` along the dual
    solution at ``b1``.  By the subgradient inequality the difference
    quotient of such a pair is at least the norm of that dual solution, so
    the estimate is close to the true modulus instead of to a random
    projection of it.

    ``radius`` is shrunk to :func:`certified_radius` when larger.
    """
    cert = _primal_gate(P, settings)
    _finite_base(P, settings)
    r = min(float(radius), certified_radius(P, cert))
    if sample_count <= 0 or r <= 0:
        return LipschitzProbe(True, 0.0, max(r, 0.0), 0)
    rng = np.random.default_rng(seed)
    finite = True
    modulus = 0.0
    step = 0.5 * r
    for _ in range(sample_count):
        b1 = P.b + _ball(rng, P.m, step)
        s1 = require(solve_any(P.replace(b=b1), settings))
        if not s1.value.is_finite:
            finite = False
            continue
        g = s1.y_opt if s1.y_opt is not None else np.zeros(P.m)
        gn = np.linalg.norm(g)
        u = g / gn if gn > 0 else _ball(rng, P.m, 1.0)
        u = u / np.linalg.norm(u)
        b2 = b1 + step * u
        v2 = _value(P.replace(b=b2), settings)
        if not v2.is_finite:
            finite = False
            continue
        modulus = max(modulus, abs(float(v2) - float(s1.value)) / np.linalg.norm(b2 - b1))
    return LipschitzProbe(finite, float(modulus), r, int(sample_count))


def dual_solution_boundedness_probe(P, b_new, probe_directions=None,
                                    settings=DEFAULT_SETTINGS):
    """Finite support values of ``S(D)`` at ``b_new`` along every probe.

    The default probes are the signed unit axes, which bound every
    coordinate of the dual solution set.
    """
    Q = P.replace(b=_direction(b_new, P.m, "b_new"))
    _primal_gate(Q, settings)
    _finite_base(Q, settings)
    if probe_directions is None:
        eye = np.eye(P.m)
        probe_directions = list(eye) + list(-eye)
    base = _base_for_levels(Q, settings)
    for w in probe_directions:
        if not sup_over_dual_solutions(Q, w, base=base, settings=settings).value.is_finite:
            return False
    return True


# -- reports ---------------------------------------------------------------------

@dataclass
class SensitivityReport:
    base_value: ExtReal
    direction: Perturbation
    derivative: ExtReal = None
    lower_slope: ExtReal = None
    upper_slope: ExtReal = None
    tau: float = None
    attained: dict = field(default_factory=dict)
    fd_table: FDTable = None
    hypotheses: Hypotheses = field(default_factory=Hypotheses)
    bounds: list = field(default_factory=list)

    def to_dict(self):
        def ext(v):
            return None if v is None else v.to_json()

        return {
            "kind": self.direction.kind,
            "direction": [float(v) for v in self.direction.direction],
            "base_value": ext(self.base_value),
            "derivative": ext(self.derivative),
            "lower_slope": ext(self.lower_slope),
            "upper_slope": ext(self.upper_slope),
            "tau": self.tau,
            "attained": self.attained,
            # attainment is judged from the size of the final iterate, not proven
            "attained_method": "iterate_norm_heuristic",
            "fd_table": [] if self.fd_table is None else self.fd_table.to_list(),
            "bounds": self.bounds,
            "hypotheses": self.hypotheses.to_dict(),
        }


def _is_polyhedral(P):
    return all(isinstance(b, (Orthant, PolyhedralH)) for b in P.K.blocks)


def analyze_rhs(P, d, t_grid=(), settings=DEFAULT_SETTINGS, fd_settings=FD_SETTINGS):
    """Full right-hand-side report: derivative, bound slopes, horizon, quotients."""
    d = _direction(d, P.m, "d")
    hyp = Hypotheses()
    try:
        _dual_gate(P, settings, hyp)
    except HypothesisViolation:
        pass
    _primal_gate(P, settings, hyp)
    base = _solved(P, settings)
    rep = SensitivityReport(base.value, Perturbation.rhs(d), hypotheses=hyp)
    lo = sup_over_dual_solutions(P, d, settings=settings)
    up = sup_over_dual_feasible(P, d, settings)
    rep.derivative = rep.lower_slope = lo.value
    rep.upper_slope = up.value
    rep.attained = {"base": True, "lower": lo.attained, "upper": up.attained}
    if _is_polyhedral(P):
        rep.tau = phi_increment_exact_polyhedral(P, d, settings)[1]
    cert = certify_strict_primal(P, settings)
    for t in _schedule(t_grid) if t_grid else ():
        rep.bounds.append({"t": t, "lower": (base.value + t * lo.value).to_json(),
                           "upper": (base.value + t * up.value).to_json(),
                           "upper_valid": _witness_survives(P, cert.witness, d, t)})
    if t_grid:
        rep.fd_table = fd_verify(P, Perturbation.rhs(d), t_grid, fd_settings)
    return rep


def analyze_obj(P, h, t_grid=(), settings=DEFAULT_SETTINGS, fd_settings=FD_SETTINGS):
    """Full cost-perturbation report mirroring :func:`analyze_rhs`."""
    h = _direction(h, P.n, "h")
    hyp = Hypotheses()
    _primal_gate(P, settings, hyp)
    _dual_gate(P, settings, hyp)
    base = _solved(P, settings)
    rep = SensitivityReport(base.value, Perturbation.obj(h), hypotheses=hyp)
    lo = inf_over_primal_feasible(P, h, settings)
    up = inf_over_primal_solutions(P, h, settings=settings)
    rep.derivative = psi_dir_deriv(P, h, settings)
    rep.lower_slope, rep.upper_slope = lo.value, up.value
    rep.attained = {"base": True, "lower": lo.attained, "upper": up.attained}
    if _is_polyhedral(P) and in_range(P.A, h)[0]:
        rep.tau = psi_increment_exact_polyhedral(P, h, settings)[1]
    for t in _schedule(t_grid) if t_grid else ():
        rep.bounds.append({"t": t, "lower": (base.value + t * lo.value).to_json(),
                           "upper": (base.value + t * up.value).to_json()})
    if t_grid:
        rep.fd_table = fd_verify(P, Perturbation.obj(h), t_grid, fd_settings)
    return rep


def fd_check(table, derivative, tol=1e-4):
    """Monotone quotients whose last entry is within ``tol`` of ``derivative``."""
    if not table.rows:
        return True
    last = table.rows[-1][1]
    if not derivative.is_finite or not last.is_finite:
        close = derivative.tag == last.tag
    else:
        close = abs(float(last) - float(derivative)) <= tol * (1.0 + abs(float(derivative)))
    return table.monotone() and close
