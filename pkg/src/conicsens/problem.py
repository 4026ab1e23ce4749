"""Conic linear programs, their duals, perturbations and the JSON format.

The primal program is ``min{c^T x : A x - b in K}``; its dual is
``max{b^T y : A^T y = c, y in K*}``.  Both are stored in the same
:class:`ConicProgram` container, distinguished by ``form``.
"""
import json
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .cones import (Cone, GeneratedV, Orthant, PolyhedralH, SecondOrder, as_cone,
                    cone_from_dict, cone_to_dict, contains, dual)
from .errors import DimensionError, NotPolyhedral, SchemaError

PRIMAL = "primal"
DUAL = "dual"


def _array(a, ndim, name):
    arr = np.array(a, dtype=float)
    if arr.ndim != ndim:
        raise DimensionError(f"{name} must be {ndim}-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DimensionError(f"{name} has non-finite entries")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class ConicProgram:
    """Data ``(A, b, c, K)`` of a primal or dual-form conic program.

    Primal form: ``A`` is ``m x n``, ``b`` in ``R^m``, ``c`` in ``R^n`` and
    ``K`` lives in ``R^m``.  Dual form (produced by :func:`build_dual`) holds
    ``(A^T, c, b, K*)`` so that the program reads
    ``max{c_D^T y : A_D y = b_D, y in K_D}``.
    """

    A: np.ndarray
    b: np.ndarray
    c: np.ndarray
    K: Cone
    form: str = field(default=PRIMAL)

    def __post_init__(self):
        A = _array(self.A, 2, "A")
        b = _array(self.b, 1, "b")
        c = _array(self.c, 1, "c")
        K = as_cone(self.K)
        rows, cols = A.shape
        if self.form == PRIMAL:
            ok = rows == len(b) == K.dim and cols == len(c)
        elif self.form == DUAL:
            ok = rows == len(b) and cols == len(c) == K.dim
        else:
            raise ValueError(f"unknown program form {self.form!r}")
        if not ok:
            raise DimensionError(
                f"inconsistent dimensions: A {A.shape}, b {b.shape}, c {c.shape}, "
                f"dim(K) {K.dim} ({self.form} form)")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "K", K)

    @property
    def m(self):
        return self.A.shape[0] if self.form == PRIMAL else self.A.shape[1]

    @property
    def n(self):
        return self.A.shape[1] if self.form == PRIMAL else self.A.shape[0]

    def replace(self, **changes):
        data = dict(A=self.A, b=self.b, c=self.c, K=self.K, form=self.form)
        data.update(changes)
        return ConicProgram(**data)

    def __eq__(self, other):
        return (isinstance(other, ConicProgram) and self.form == other.form
                and self.K == other.K and np.array_equal(self.A, other.A)
                and np.array_equal(self.b, other.b) and np.array_equal(self.c, other.c))

    __hash__ = None

    def objective(self, v):
        return float(self.c @ np.asarray(v, dtype=float))

    def is_feasible(self, v, tol=1e-8):
        """Membership in ``F(P)`` (primal form) or ``F(D)`` (dual form)."""
        v = np.asarray(v, dtype=float)
        if self.form == PRIMAL:
            return contains(self.K, self.A @ v - self.b, tol)
        eq = np.linalg.norm(self.A @ v - self.b) <= tol * (1.0 + np.linalg.norm(self.b))
        return bool(eq) and contains(self.K, v, tol)


def build_dual(P):
    """Dual-form program ``max{b^T y : A^T y = c, y in K*}`` of a primal ``P``."""
    if P.form != PRIMAL:
        raise ValueError("build_dual expects a primal-form program")
    return ConicProgram(P.A.T, P.c, P.b, dual(P.K), form=DUAL)


# -- polyhedral lowering -------------------------------------------------------

def lowering_matrix(K):
    """Block-diagonal ``M`` with ``y in K  <=>  M y in K'`` for the lowered cone.

    H-blocks ``{By >= 0}`` lower to ``R^k_+`` through ``B``; orthant and
    second-order blocks are kept (identity rows).  Generated blocks have no
    such representation and raise :class:`NotPolyhedral`.
    """
    K = as_cone(K)
    mats, blocks = [], []
    for blk in K.blocks:
        if isinstance(blk, PolyhedralH):
            mats.append(blk.B)
            blocks.append(Orthant(blk.B.shape[0]))
        elif isinstance(blk, GeneratedV):
            raise NotPolyhedral("generated (V-rep) blocks cannot be lowered to H form")
        else:
            mats.append(np.eye(blk.dim))
            blocks.append(blk)
    return sla.block_diag(*mats), Cone(_merge_orthants(blocks))


def _merge_orthants(blocks):
    out = []
    for blk in blocks:
        if isinstance(blk, Orthant) and out and isinstance(out[-1], Orthant):
            out[-1] = Orthant(out[-1].dim + blk.dim)
        else:
            out.append(blk)
    return tuple(out)


def lower_program(P):
    """Rewrite ``P`` over a solver-supported cone; returns ``(P', M)``."""
    if P.K.solver_supported:
        return P, np.eye(P.m)
    M, K2 = lowering_matrix(P.K)
    return ConicProgram(M @ P.A, M @ P.b, P.c, K2), M


def reduce_polyhedral(P):
    """Equivalent pure-orthant program ``min{c^T x : B A x >= B b}``."""
    if any(isinstance(b, (SecondOrder, GeneratedV)) for b in P.K.blocks):
        raise NotPolyhedral("reduce_polyhedral needs orthant/polyhedral blocks only")
    if len(P.K.blocks) == 1 and isinstance(P.K.blocks[0], Orthant):
        return P
    return lower_program(P)[0]


# -- perturbations ---------------------------------------------------------------

RHS = "rhs"
OBJ = "obj"


@dataclass(frozen=True, eq=False)
class Perturbation:
    """Step ``t`` along ``b + t d`` (``kind="rhs"``) or ``c + t h`` (``"obj"``)."""

    kind: str
    direction: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        if self.kind not in (RHS, OBJ):
            raise ValueError(f"unknown perturbation kind {self.kind!r}")
        object.__setattr__(self, "direction", _array(self.direction, 1, "direction"))
        t = float(self.t)
        if not np.isfinite(t) or t < 0:
            raise ValueError(f"step must be a finite nonnegative number, got {self.t}")
        object.__setattr__(self, "t", t)

    @classmethod
    def rhs(cls, d, t=0.0):
        return cls(RHS, d, t)

    @classmethod
    def obj(cls, h, t=0.0):
        return cls(OBJ, h, t)

    def at(self, t):
        return Perturbation(self.kind, self.direction, t)


def perturb(P, pert):
    """Return ``P`` with ``b + t d`` or ``c + t h``; ``A`` and ``K`` unchanged."""
    v = pert.direction
    if pert.kind == RHS:
        if v.shape != P.b.shape:
            raise DimensionError(f"rhs direction has shape {v.shape}, expected {P.b.shape}")
        return P.replace(b=P.b + pert.t * v)
    if v.shape != P.c.shape:
        raise DimensionError(f"objective direction has shape {v.shape}, expected {P.c.shape}")
    return P.replace(c=P.c + pert.t * v)


# -- JSON ------------------------------------------------------------------------

def problem_to_dict(P):
    doc = {
        "n": int(P.n) if P.form == PRIMAL else int(P.A.shape[1]),
        "m": int(P.A.shape[0]),
        "A": P.A.tolist(),
        "b": P.b.tolist(),
        "c": P.c.tolist(),
        "cone": cone_to_dict(P.K),
    }
    if P.form != PRIMAL:
        doc["form"] = P.form
    return doc


def serialize_problem(P, indent=None):
    return json.dumps(problem_to_dict(P), indent=indent)


def _line_of(text, key):
    if text is None:
        return None
    needle = f'"{key}"'
    for i, line in enumerate(text.splitlines(), start=1):
        if needle in line:
            return i
    return None


def problem_from_dict(doc, text=None):
    if not isinstance(doc, dict):
        raise SchemaError("top level must be a JSON object")
    for key in ("n", "m", "A", "b", "c", "cone"):
        if key not in doc:
            raise SchemaError(f"missing required field '{key}'", field=key)
    for key in ("n", "m"):
        v = doc[key]
        if isinstance(v, bool) or not isinstance(v, int) or v < 1:
            raise SchemaError("must be a positive integer", field=key, line=_line_of(text, key))

    def numbers(v, key):
        if not isinstance(v, list) or any(isinstance(e, bool) or not isinstance(e, (int, float))
                                          for e in v):
            raise SchemaError("must be a list of numbers", field=key, line=_line_of(text, key))
        return v

    A = doc["A"]
    if not isinstance(A, list) or not A:
        raise SchemaError("must be a non-empty list of rows", field="A", line=_line_of(text, "A"))
    for i, row in enumerate(A):
        numbers(row, f"A[{i}]")
    b = numbers(doc["b"], "b")
    c = numbers(doc["c"], "c")
    cone = cone_from_dict(doc["cone"])
    form = doc.get("form", PRIMAL)
    if form not in (PRIMAL, DUAL):
        raise SchemaError(f"unknown form {form!r}", field="form", line=_line_of(text, "form"))

    n, m = doc["n"], doc["m"]
    widths = {len(r) for r in A}
    if len(widths) != 1:
        raise DimensionError("rows of A have different lengths")
    rows, cols = len(A), widths.pop()
    if form == PRIMAL:
        expect = {"rows(A)": (rows, m), "cols(A)": (cols, n), "len(b)": (len(b), m),
                  "len(c)": (len(c), n), "dim(K)": (cone.dim, m)}
    else:
        expect = {"rows(A)": (rows, m), "cols(A)": (cols, n), "len(b)": (len(b), m),
                  "len(c)": (len(c), n), "dim(K)": (cone.dim, n)}
    for name, (got, want) in expect.items():
        if got != want:
            raise DimensionError(f"{name} = {got} does not match declared size {want}")
    return ConicProgram(np.array(A, dtype=float), b, c, cone, form=form)


def parse_problem(text):
    """Parse a problem document; raises :class:`SchemaError` or :class:`DimensionError`."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc.msg}", line=exc.lineno) from exc
    return problem_from_dict(doc, text)


def load_problem(path):
    with open(path, encoding="utf-8") as fh:
        return parse_problem(fh.read())
