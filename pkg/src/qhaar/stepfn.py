"""Locally constant, compactly supported complex functions on Q_2 and Q_2^2.

A function is stored as a sparse map from canonical coset representatives to
complex values.  The representation has two integer parameters:

* ``m``    -- the function is constant on cosets of 2^m * Z_2^dim,
* ``n``    -- the support is contained in the ball of radius 2^n.

A canonical representative at scale (m, n) is a dyadic rational whose binary
digits live only at positions -n, ..., m-1; there are 2^(m+n) of them per
coordinate and they key the cells bijectively.  Each cell carries Haar
measure 2^(-dim*m) (the measure of Z_2^dim is 1).  Absent keys mean the
value 0.

Keys are exact, so translation, quincunx dilation and refinement are all
exact permutations/refinements of the cell map; floating point only enters
through the complex values.  Instances are treated as immutable: operations
return new functions.
"""

from __future__ import annotations

import hashlib
import json
from fractions import Fraction

import numpy as np

from .dyadic import (
    DyadicRational,
    DyadicVec2,
    QuincunxMatrix,
    QUINCUNX_A,
    QUINCUNX_A_INV,
)

__all__ = [
    "StepFunction",
    "indicator_ball",
    "lincomb",
    "tensor",
    "allclose",
    "cell_matrix",
    "gram_matrix",
    "step_function_to_json",
    "step_function_from_json",
]


def _coset_rep(x: DyadicRational, m: int) -> DyadicRational:
    """Canonical representative of x + 2^m Z_2: digits at positions < m kept."""
    if x.exp <= -m:  # x lies in 2^m Z_2
        return DyadicRational(0)
    t = m + x.exp
    return DyadicRational(x.num % (1 << t), x.exp)


def _measure(dim: int, m: int) -> Fraction:
    e = dim * m
    return Fraction(1, 1 << e) if e >= 0 else Fraction(1 << (-e))


def _ball_bound(n: int) -> Fraction:
    return Fraction(1 << n) if n >= 0 else Fraction(1, 1 << (-n))


def _coords(x) -> tuple:
    if isinstance(x, DyadicVec2):
        return (x.x1, x.x2)
    if isinstance(x, DyadicRational):
        return (x,)
    if isinstance(x, tuple):
        return x
    raise TypeError(f"cannot interpret {x!r} as a point")


# Coset decompositions of T^{-1}(Z_2^2) into cosets of 2*Z_2^2, used to
# re-grid a cell under the two admissible dilations.  For A the preimage is
# the even-coordinate-sum sublattice (2 cosets); for A^{-1} it is A(Z_2^2),
# a union of 8 cosets inside the ball of radius 2.
_H = DyadicRational(1, 1)
_3H = DyadicRational(3, 1)
_SUBCELLS = {
    "A": [DyadicVec2.of(0, 0), DyadicVec2.of(1, 1)],
    "A_inverse": [
        DyadicVec2.of(0, 0),
        DyadicVec2.of(0, 1),
        DyadicVec2.of(1, 0),
        DyadicVec2.of(1, 1),
        DyadicVec2(_H, _H),
        DyadicVec2(_H, _3H),
        DyadicVec2(_3H, _H),
        DyadicVec2(_3H, _3H),
    ],
}


class StepFunction:
    """Sparse exact-grid step function on Q_2^dim, dim in {1, 2}."""

    __slots__ = ("dim", "m", "n", "cells")

    def __init__(self, dim: int, m: int, n: int, cells: dict):
        if dim not in (1, 2):
            raise ValueError("dim must be 1 or 2")
        if m < -n:
            raise ValueError(f"invalid parameters: m={m} < -n={-n}")
        self.dim = dim
        self.m = m
        self.n = n
        self.cells = cells

    # -- constructors ---------------------------------------------------------

    @classmethod
    def zero(cls, dim: int) -> "StepFunction":
        return cls(dim, 0, 0, {})

    # -- basic queries ----------------------------------------------------------

    def cell_measure(self) -> Fraction:
        return _measure(self.dim, self.m)

    def evaluate(self, x) -> complex:
        """Value of the cell containing x (0 outside the support ball)."""
        pt = _coords(x)
        if len(pt) != self.dim:
            raise ValueError("point dimension mismatch")
        bound = _ball_bound(self.n)
        if any(c.norm2() > bound for c in pt):
            return 0j
        key = tuple(_coset_rep(c, self.m) for c in pt)
        return self.cells.get(key, 0j)

    def norm_sq(self) -> float:
        meas = float(self.cell_measure())
        return sum((v.real * v.real + v.imag * v.imag) for v in self.cells.values()) * meas

    def norm(self) -> float:
        return self.norm_sq() ** 0.5

    def integral(self) -> complex:
        meas = float(self.cell_measure())
        return sum(self.cells.values(), start=0j) * meas

    def support_is_in_ball(self, radius_exp: int) -> bool:
        if not self.cells:
            return True
        if self.m < -radius_exp:  # a single cell already overflows the ball
            return False
        bound = _ball_bound(radius_exp)
        return all(c.norm2() <= bound for key in self.cells for c in key)

    # -- grid changes -----------------------------------------------------------

    def refine(self, m: int, n: int | None = None) -> "StepFunction":
        """Same function on a finer grid: split every cell into 2^(dim*(m-m0))."""
        n = self.n if n is None else n
        if m < self.m or n < self.n:
            raise ValueError("refine cannot coarsen")
        if m == self.m:
            return StepFunction(self.dim, m, n, dict(self.cells))
        cells = {}
        offsets = _digit_offsets(self.dim, self.m, m)
        for key, v in self.cells.items():
            for off in offsets:
                cells[tuple(k + o for k, o in zip(key, off))] = v
        return StepFunction(self.dim, m, n, cells)

    def canonicalize(self) -> "StepFunction":
        """The unique minimal representation of the same function.

        Drops exact-zero cells, merges equal-valued sibling groups to lower m,
        and shrinks the support exponent n while the support allows it.  The
        zero function normalizes to (m, n) = (0, 0) with no cells.
        """
        cells = {k: v for k, v in self.cells.items() if v != 0}
        if not cells:
            return StepFunction(self.dim, 0, 0, {})
        m, n = self.m, self.n
        sibs = 1 << self.dim
        while m - 1 >= -n:
            groups: dict = {}
            for key, v in cells.items():
                parent = tuple(_coset_rep(c, m - 1) for c in key)
                groups.setdefault(parent, []).append(v)
            if all(
                len(vs) == sibs and all(v == vs[0] for v in vs)
                for vs in groups.values()
            ):
                cells = {parent: vs[0] for parent, vs in groups.items()}
                m -= 1
            else:
                break
        while m >= 1 - n:
            bound = _ball_bound(n - 1)
            if all(c.norm2() <= bound for key in cells for c in key):
                n -= 1
            else:
                break
        return StepFunction(self.dim, m, n, cells)

    # -- geometry operations ------------------------------------------------------

    def translate(self, a) -> "StepFunction":
        """x -> f(x - a); exact re-keying of the cells."""
        shift = _coords(a)
        if len(shift) != self.dim:
            raise ValueError("shift dimension mismatch")
        n = self.n
        for c in shift:
            if c.num != 0:
                n = max(n, c.exp)
        cells = {
            tuple(_coset_rep(k + d, self.m) for k, d in zip(key, shift)): v
            for key, v in self.cells.items()
        }
        return StepFunction(self.dim, self.m, n, cells)

    def dilate(self, t: QuincunxMatrix) -> "StepFunction":
        """x -> f(Tx) for T = A or A^{-1}; result is canonicalized.

        Scales the squared norm by 1/2 for A and by 2 for A^{-1}.
        """
        if self.dim != 2:
            raise ValueError("quincunx dilation is defined on Q_2^2 only")
        if t.tag not in _SUBCELLS:
            raise ValueError("dilation supports tags A and A_inverse only")
        inv = QUINCUNX_A_INV if t.tag == "A" else QUINCUNX_A
        m1, n1 = self.m + 1, self.n + 1
        scale = DyadicRational(1, -self.m)  # 2^m
        cells = {}
        for key, v in self.cells.items():
            base = inv.apply(DyadicVec2(*key))
            for w in _SUBCELLS[t.tag]:
                pt = DyadicVec2(base.x1 + scale * w.x1, base.x2 + scale * w.x2)
                cells[(_coset_rep(pt.x1, m1), _coset_rep(pt.x2, m1))] = v
        return StepFunction(2, m1, n1, cells).canonicalize()

    def dilate_dyadic(self, j: int) -> "StepFunction":
        """x -> f(2^(-j) x): the separable dilation, exact for any j."""
        if j == 0:
            return self
        cells = {
            tuple(DyadicRational(k.num, k.exp - j) if k.num else k for k in key): v
            for key, v in self.cells.items()
        }
        return StepFunction(self.dim, self.m + j, self.n - j, cells)

    def inner(self, other: "StepFunction") -> complex:
        """Haar-measure inner product integral of self * conj(other)."""
        if self.dim != other.dim:
            raise ValueError("dimension mismatch")
        m = max(self.m, other.m)
        f = self.refine(m) if self.m < m else self
        g = other.refine(m) if other.m < m else other
        small, big, conj_small = (
            (f.cells, g.cells, False)
            if len(f.cells) <= len(g.cells)
            else (g.cells, f.cells, True)
        )
        acc = 0j
        for key, v in small.items():
            w = big.get(key)
            if w is not None:
                acc += (w * v.conjugate()) if conj_small else (v * w.conjugate())
        return acc * float(_measure(self.dim, m))

    # -- equality (as functions) -----------------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, StepFunction):
            return NotImplemented
        if self.dim != other.dim:
            return False
        a, b = self.canonicalize(), other.canonicalize()
        return a.m == b.m and a.n == b.n and a.cells == b.cells

    __hash__ = None  # mutable-dict payload; not a dict key

    def __repr__(self) -> str:
        return (
            f"StepFunction(dim={self.dim}, m={self.m}, n={self.n}, "
            f"{len(self.cells)} cells)"
        )

    def digest(self) -> str:
        """Hash of the canonical form; stable id for basis bookkeeping."""
        c = self.canonicalize()
        payload = json.dumps(step_function_to_json(c), sort_keys=True)
        return hashlib.sha256(payload.encode()).hexdigest()[:16]


def _digit_offsets(dim: int, m_from: int, m_to: int):
    """All sums of digits at positions m_from .. m_to-1, per coordinate."""
    per_coord = [DyadicRational(0)]
    for pos in range(m_from, m_to):
        step = DyadicRational(1, -pos)
        per_coord = [r for base in per_coord for r in (base, base + step)]
    if dim == 1:
        return [(r,) for r in per_coord]
    return [(r1, r2) for r1 in per_coord for r2 in per_coord]


def indicator_ball(center, radius_exp: int) -> StepFunction:
    """Characteristic function of center + 2^(-radius_exp) Z_2^dim.

    The dimension is taken from the center (DyadicVec2 gives a planar ball,
    DyadicRational a one-dimensional one).
    """
    pt = _coords(center)
    dim = len(pt)
    m = -radius_exp
    n = radius_exp
    for c in pt:
        if c.num != 0:
            n = max(n, c.exp)
    key = tuple(_coset_rep(c, m) for c in pt)
    return StepFunction(dim, m, n, {key: 1.0 + 0j})


def lincomb(terms) -> StepFunction:
    """Pointwise sum of scalar * function; grid parameters are the maxima."""
    terms = [(complex(c), f) for c, f in terms]
    if not terms:
        raise ValueError("lincomb of no terms has no dimension")
    dim = terms[0][1].dim
    if any(f.dim != dim for _, f in terms):
        raise ValueError("dimension mismatch")
    m = max(f.m for _, f in terms)
    n = max(f.n for _, f in terms)
    cells: dict = {}
    for c, f in terms:
        if c == 0:
            continue
        rf = f.refine(m, n)
        for key, v in rf.cells.items():
            cells[key] = cells.get(key, 0j) + c * v
    return StepFunction(dim, m, n, cells)


def tensor(f: StepFunction, g: StepFunction) -> StepFunction:
    """(f (x) g)(x1, x2) = f(x1) * g(x2) for one-dimensional factors."""
    if f.dim != 1 or g.dim != 1:
        raise ValueError("tensor expects one-dimensional factors")
    m = max(f.m, g.m)
    n = max(f.n, g.n)
    rf, rg = f.refine(m, n), g.refine(m, n)
    cells = {
        (kf[0], kg[0]): vf * vg
        for kf, vf in rf.cells.items()
        for kg, vg in rg.cells.items()
        if vf * vg != 0
    }
    return StepFunction(2, m, n, cells)


def allclose(f: StepFunction, g: StepFunction, tol: float = 1e-12) -> bool:
    """Pointwise max difference below tol, checked on the common grid."""
    m = max(f.m, g.m)
    rf, rg = f.refine(m), g.refine(m)
    keys = set(rf.cells) | set(rg.cells)
    return all(abs(rf.cells.get(k, 0j) - rg.cells.get(k, 0j)) <= tol for k in keys)


def cell_matrix(fs) -> tuple[list, np.ndarray, float]:
    """Common-refinement vectorization of a family of step functions.

    Returns (keys, V, measure) with V[i, j] the value of fs[i] on cell
    keys[j]; every inner product is then measure * (V V*).
    """
    fs = list(fs)
    if not fs:
        raise ValueError("empty family")
    dim = fs[0].dim
    m = max(f.m for f in fs)
    refined = [f.refine(m) if f.m < m else f for f in fs]
    keys = sorted(
        {k for f in refined for k in f.cells},
        key=lambda key: tuple((c.exp, c.num) for c in key),
    )
    index = {k: i for i, k in enumerate(keys)}
    v = np.zeros((len(fs), len(keys)), dtype=complex)
    for i, f in enumerate(refined):
        for key, val in f.cells.items():
            v[i, index[key]] = val
    return keys, v, float(_measure(dim, m))


def gram_matrix(fs) -> np.ndarray:
    """Matrix of pairwise inner products <f_i, f_j>."""
    _, v, measure = cell_matrix(fs)
    return (v @ v.conj().T) * measure


# -- JSON form ------------------------------------------------------------------


def step_function_to_json(f: StepFunction) -> dict:
    cells = sorted(
        f.cells.items(), key=lambda item: tuple((c.exp, c.num) for c in item[0])
    )
    return {
        "dim": f.dim,
        "m": f.m,
        "n": f.n,
        "cells": [
            {"rep": [str(c) for c in key], "re": v.real, "im": v.imag}
            for key, v in cells
        ],
    }


def step_function_from_json(obj: dict) -> StepFunction:
    dim, m, n = int(obj["dim"]), int(obj["m"]), int(obj["n"])
    cells = {}
    for entry in obj["cells"]:
        key = tuple(DyadicRational.parse(s) for s in entry["rep"])
        if len(key) != dim:
            raise ValueError("cell representative has wrong dimension")
        for c in key:
            if _coset_rep(c, m) != c:
                raise ValueError(f"representative {c} not canonical at scale m={m}")
            if c.exp > n:
                raise ValueError(f"representative {c} lies outside the ball 2^{n}")
        cells[key] = complex(entry["re"], entry["im"])
    return StepFunction(dim, m, n, cells)
