"""Closed convex cones built from orthant, second-order and polyhedral blocks.

A :class:`Cone` is an immutable product of blocks.  Four block types are
supported:

* :class:`Orthant` -- the nonnegative orthant ``R^dim_+``;
* :class:`SecondOrder` -- ``{y : y[-1] >= ||y[:-1]||}`` (head stored last);
* :class:`PolyhedralH` -- ``{y : B y >= 0}``;
* :class:`GeneratedV` -- ``{G lam : lam >= 0}``.

Only orthant and second-order blocks carry a barrier; polyhedral programs
are lowered to orthant form (see :func:`conicsens.problem.reduce_polyhedral`)
before they reach the interior-point solver.
"""
from dataclasses import dataclass

import numpy as np
from scipy.optimize import nnls

from .errors import (BarrierUnsupported, DimensionError, EmptyInterior,
                     InteriorTestUnsupported, NotInterior, SchemaError)

#: residual floor for V-rep membership (no closed form exists)
NNLS_TOL = 1e-8
#: optimal margin of the auxiliary LP below which an H-cone has empty interior
EMPTY_INTERIOR_TOL = 1e-7


def _frozen(a, ndim):
    arr = np.array(a, dtype=float)
    if arr.ndim != ndim:
        raise DimensionError(f"expected a {ndim}-d array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DimensionError("cone data must be finite")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Orthant:
    dim: int

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 1:
            raise DimensionError(f"orthant dimension must be >= 1, got {self.dim}")


@dataclass(frozen=True)
class SecondOrder:
    dim: int

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 2:
            raise DimensionError(f"second-order cone dimension must be >= 2, got {self.dim}")


@dataclass(frozen=True, eq=False)
class PolyhedralH:
    """``{y : B y >= 0}`` with ``B`` of shape ``(k, d)``."""

    B: np.ndarray

    def __post_init__(self):
        B = _frozen(self.B, 2)
        if B.shape[0] < 1 or B.shape[1] < 1:
            raise DimensionError(f"empty polyhedral matrix of shape {B.shape}")
        if np.any(np.all(B == 0, axis=1)):
            raise DimensionError("polyhedral matrix has an all-zero row")
        object.__setattr__(self, "B", B)

    @property
    def dim(self):
        return self.B.shape[1]

    def __eq__(self, other):
        return isinstance(other, PolyhedralH) and np.array_equal(self.B, other.B)

    def __hash__(self):
        return hash(("H", self.B.shape, self.B.tobytes()))


@dataclass(frozen=True, eq=False)
class GeneratedV:
    """``{G lam : lam >= 0}`` with ``G`` of shape ``(d, k)``."""

    G: np.ndarray

    def __post_init__(self):
        G = _frozen(self.G, 2)
        if G.shape[0] < 1 or G.shape[1] < 1:
            raise DimensionError(f"empty generator matrix of shape {G.shape}")
        if np.any(np.all(G == 0, axis=0)):
            raise DimensionError("generator matrix has an all-zero column")
        object.__setattr__(self, "G", G)

    @property
    def dim(self):
        return self.G.shape[0]

    def __eq__(self, other):
        return isinstance(other, GeneratedV) and np.array_equal(self.G, other.G)

    def __hash__(self):
        return hash(("V", self.G.shape, self.G.tobytes()))


BLOCK_TYPES = (Orthant, SecondOrder, PolyhedralH, GeneratedV)


@dataclass(frozen=True)
class Cone:
    """Cartesian product of blocks acting on consecutive coordinates."""

    blocks: tuple

    def __post_init__(self):
        blocks = tuple(self.blocks)
        if not blocks:
            raise DimensionError("a cone needs at least one block")
        for blk in blocks:
            if not isinstance(blk, BLOCK_TYPES):
                raise TypeError(f"unknown cone block {blk!r}")
        object.__setattr__(self, "blocks", blocks)

    @property
    def dim(self):
        return sum(b.dim for b in self.blocks)

    def slices(self):
        """Yield ``(block, slice)`` pairs in coordinate order."""
        start = 0
        for blk in self.blocks:
            yield blk, slice(start, start + blk.dim)
            start += blk.dim

    @property
    def solver_supported(self):
        return all(isinstance(b, (Orthant, SecondOrder)) for b in self.blocks)

    @property
    def polyhedral(self):
        return all(isinstance(b, (Orthant, PolyhedralH, GeneratedV))
                   for b in self.blocks)


def as_cone(K):
    """Wrap a single block into a :class:`Cone`; cones pass through."""
    if isinstance(K, Cone):
        return K
    if isinstance(K, BLOCK_TYPES):
        return Cone((K,))
    if isinstance(K, (list, tuple)):
        return Cone(tuple(K))
    raise TypeError(f"cannot interpret {K!r} as a cone")


def _vector(K, y):
    y = np.asarray(y, dtype=float)
    if y.shape != (K.dim,):
        raise DimensionError(f"vector of shape {y.shape} does not match cone dimension {K.dim}")
    return y


# -- duality -----------------------------------------------------------------

def _dual_block(blk):
    if isinstance(blk, (Orthant, SecondOrder)):
        return blk
    if isinstance(blk, PolyhedralH):
        return GeneratedV(blk.B.T)
    return PolyhedralH(blk.G.T)


def dual(K):
    """Return the dual cone ``K* = {v : v^T y >= 0 for all y in K}``.

    Orthant and second-order blocks are self-dual; an H-cone ``{By >= 0}``
    maps to the cone generated by the rows of ``B`` and vice versa.
    """
    K = as_cone(K)
    return Cone(tuple(_dual_block(b) for b in K.blocks))


# -- membership --------------------------------------------------------------

def _block_contains(blk, y, tol):
    if isinstance(blk, Orthant):
        return bool(np.min(y) >= -tol)
    if isinstance(blk, SecondOrder):
        return bool(y[-1] - np.linalg.norm(y[:-1]) >= -tol)
    if isinstance(blk, PolyhedralH):
        slack = tol * (1.0 + np.linalg.norm(blk.B, axis=1) * np.linalg.norm(y))
        return bool(np.all(blk.B @ y >= -slack))
    _, resid = nnls(blk.G, y)
    return bool(resid <= max(tol, NNLS_TOL) * (1.0 + np.linalg.norm(y)))


def contains(K, y, tol=0.0):
    """Test ``y in K`` up to a block-wise slack ``tol``.

    Generated blocks are tested by nonnegative least squares; their residual
    tolerance never drops below ``NNLS_TOL * (1 + ||y||)``.
    """
    K = as_cone(K)
    y = _vector(K, y)
    return all(_block_contains(b, y[sl], tol) for b, sl in K.slices())


def block_margins(K, y):
    """Strict-interior margin of each block of ``y``.

    Raises
    ------
    InteriorTestUnsupported
        For generated blocks, which have no closed-form margin.
    """
    K = as_cone(K)
    y = _vector(K, y)
    out = []
    for blk, sl in K.slices():
        v = y[sl]
        if isinstance(blk, Orthant):
            out.append(float(np.min(v)))
        elif isinstance(blk, SecondOrder):
            out.append(float(v[-1] - np.linalg.norm(v[:-1])))
        elif isinstance(blk, PolyhedralH):
            out.append(float(np.min(blk.B @ v)))
        else:
            raise InteriorTestUnsupported(
                "interior test for a generated (V-rep) block; lower it to H form first")
    return out


def interior_margin(K, y):
    """Smallest block margin; positive iff ``y`` is strictly interior."""
    return min(block_margins(K, y))


def interior_contains(K, y, margin):
    """True iff every block margin of ``y`` exceeds ``margin``."""
    return interior_margin(K, y) > margin


# -- interior points ---------------------------------------------------------

def _h_interior_point(B):
    # max t  s.t.  B y >= t 1,  -1 <= y <= 1
    from .solver._hsde import ORTHANT, CoreCone, hsde_solve

    k, d = B.shape
    G = np.block([
        [-B, np.ones((k, 1))],
        [np.eye(d), np.zeros((d, 1))],
        [-np.eye(d), np.zeros((d, 1))],
    ])
    h = np.concatenate([np.zeros(k), np.ones(2 * d)])
    c = np.zeros(d + 1)
    c[-1] = -1.0
    res = hsde_solve(c, G, h, CoreCone(((ORTHANT, k + 2 * d),)))
    if res.status != "optimal" or -res.pcost <= EMPTY_INTERIOR_TOL:
        raise EmptyInterior(
            f"polyhedral block has empty interior (auxiliary margin {-res.pcost:.3e})")
    return res.x[:d]


def canonical_interior_point(K):
    """A deterministic strictly interior point of ``K``.

    Orthant blocks give all-ones, second-order blocks the axis point
    ``(0, ..., 0, 1)``, H-blocks the maximiser of the auxiliary LP
    ``max{t : B y >= t 1, ||y||_inf <= 1}`` and generated blocks the sum of
    their generators (interior exactly when the generators span).
    """
    K = as_cone(K)
    u = np.zeros(K.dim)
    for blk, sl in K.slices():
        if isinstance(blk, Orthant):
            u[sl] = 1.0
        elif isinstance(blk, SecondOrder):
            u[sl.stop - 1] = 1.0
        elif isinstance(blk, PolyhedralH):
            u[sl] = _h_interior_point(blk.B)
        else:
            if np.linalg.matrix_rank(blk.G) < blk.dim:
                raise EmptyInterior("generators do not span the ambient space")
            u[sl] = blk.G.sum(axis=1)
    return u


# -- barriers ----------------------------------------------------------------

def barrier_value_grad_hess(K, y):
    """Logarithmic barrier of an orthant/SOC product with its derivatives.

    Orthant blocks contribute ``-sum(log y)``; second-order blocks
    ``-log(y[-1]**2 - ||y[:-1]||**2)``.
    """
    K = as_cone(K)
    y = _vector(K, y)
    value = 0.0
    grad = np.zeros(K.dim)
    hess = np.zeros((K.dim, K.dim))
    for blk, sl in K.slices():
        v = y[sl]
        if isinstance(blk, Orthant):
            if np.min(v) <= 0:
                raise NotInterior("point is not in the interior of the orthant")
            value -= np.sum(np.log(v))
            grad[sl] = -1.0 / v
            hess[sl, sl] = np.diag(1.0 / v ** 2)
        elif isinstance(blk, SecondOrder):
            nrm = np.linalg.norm(v[:-1])
            if v[-1] - nrm <= 0:
                raise NotInterior("point is not in the interior of the second-order cone")
            det = (v[-1] - nrm) * (v[-1] + nrm)
            jv = -v.copy()
            jv[-1] = v[-1]
            J = -np.eye(len(v))
            J[-1, -1] = 1.0
            value -= np.log(det)
            grad[sl] = -2.0 * jv / det
            hess[sl, sl] = -2.0 * J / det + 4.0 * np.outer(jv, jv) / det ** 2
        else:
            raise BarrierUnsupported(
                f"{type(blk).__name__} blocks have no barrier; reduce the program first")
    return value, grad, hess


# -- serialization -------------------------------------------------------------

def cone_to_dict(K):
    K = as_cone(K)
    out = []
    for blk in K.blocks:
        if isinstance(blk, Orthant):
            out.append({"type": "orthant", "dim": blk.dim})
        elif isinstance(blk, SecondOrder):
            out.append({"type": "soc", "dim": blk.dim})
        elif isinstance(blk, PolyhedralH):
            out.append({"type": "polyhedral", "B": blk.B.tolist()})
        else:
            out.append({"type": "generated", "G": blk.G.tolist()})
    return {"blocks": out}


def _matrix_field(doc, key, where):
    if key not in doc:
        raise SchemaError(f"missing '{key}'", field=f"{where}.{key}")
    rows = doc[key]
    if (not isinstance(rows, list) or not rows
            or not all(isinstance(r, list) for r in rows)):
        raise SchemaError("expected a non-empty list of rows", field=f"{where}.{key}")
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise SchemaError("rows have different lengths", field=f"{where}.{key}")
    for i, r in enumerate(rows):
        for j, v in enumerate(r):
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise SchemaError("entries must be numbers", field=f"{where}.{key}[{i}][{j}]")
    return np.array(rows, dtype=float)


def cone_from_dict(doc, where="cone"):
    if not isinstance(doc, dict) or "blocks" not in doc:
        raise SchemaError("cone must be an object with a 'blocks' list", field=where)
    blocks = doc["blocks"]
    if not isinstance(blocks, list) or not blocks:
        raise SchemaError("'blocks' must be a non-empty list", field=f"{where}.blocks")
    out = []
    for i, b in enumerate(blocks):
        at = f"{where}.blocks[{i}]"
        if not isinstance(b, dict) or "type" not in b:
            raise SchemaError("block must be an object with a 'type'", field=at)
        kind = b["type"]
        try:
            if kind in ("orthant", "soc"):
                dim = b.get("dim")
                if isinstance(dim, bool) or not isinstance(dim, int):
                    raise SchemaError("'dim' must be an integer", field=f"{at}.dim")
                out.append(Orthant(dim) if kind == "orthant" else SecondOrder(dim))
            elif kind == "polyhedral":
                out.append(PolyhedralH(_matrix_field(b, "B", at)))
            elif kind == "generated":
                out.append(GeneratedV(_matrix_field(b, "G", at)))
            else:
                raise SchemaError(f"unknown block type {kind!r}", field=f"{at}.type")
        except DimensionError as exc:
            raise SchemaError(str(exc), field=at) from exc
    return Cone(tuple(out))
