"""Multiresolution objects on the 2-adic plane and their structural checks.

Two nested-space families live here:

* the quincunx family, generated by the scaling function 1_{Z_2^2} under the
  dilation x -> Ax (A halves the plane's Haar measure, so a single wavelet
  generator suffices), and
* the separable family, the tensor square of the univariate Haar setting,
  with dyadic dilation x -> x/2 and three wavelet generators.

Level-j slices are made finite by bounding supports inside a ball of radius
2^t, which turns the space relations (nesting, orthonormal generators, and
the fact that one quincunx step is "half" a separable step) into concrete
linear algebra over the cell grids.

Generators at level j carry the normalizing factor 2^(j/2) (quincunx) or
2^j (separable) so every slice basis is orthonormal; the underlying dilation
scales squared norms by 2^(-j) and 2^(-2j) respectively.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dyadic import (
    DyadicRational,
    DyadicVec2,
    QUINCUNX_A,
    QUINCUNX_A_INV,
    character,
    enumerate_shifts,
)
from .stepfn import StepFunction, cell_matrix, gram_matrix, indicator_ball, lincomb, tensor

__all__ = [
    "scaling_function",
    "quincunx_wavelet",
    "haar_scaling_1d",
    "haar_wavelet_1d",
    "separable_scaling",
    "separable_wavelets",
    "integer_translation_sign",
    "SpaceSlice",
    "space_slice",
    "quincunx_slice_shifts",
    "separable_slice_shifts",
    "orthonormality_defect",
    "max_projection_residual",
    "SquareRootReport",
    "verify_square_root",
]

_ZERO = DyadicRational(0)
_ONE = DyadicRational(1)


def scaling_function() -> StepFunction:
    """1_{Z_2^2}, the scaling function shared by both families."""
    return indicator_ball(DyadicVec2(_ZERO, _ZERO), 0)


def quincunx_wavelet() -> StepFunction:
    """The base quincunx wavelet phi(A x) - phi(A x - (1/2, 1/2)).

    Supported on Z_2^2 with value +1 where the coordinate sum is an even
    2-adic integer and -1 where it is odd; unit norm.
    """
    d = scaling_function().dilate(QUINCUNX_A)
    return lincomb([(1, d), (-1, d.translate(DyadicVec2(_ZERO, _ONE)))]).canonicalize()


def haar_scaling_1d() -> StepFunction:
    return indicator_ball(_ZERO, 0)


def haar_wavelet_1d() -> StepFunction:
    """chi(x/2) on Z_2: value +1 on 2Z_2 and -1 on 1 + 2Z_2."""
    half = DyadicRational(1, 1)
    cells = {
        (_ZERO,): character(_ZERO),
        (_ONE,): character(half),
    }
    return StepFunction(1, 1, 0, cells)


def separable_scaling() -> StepFunction:
    return tensor(haar_scaling_1d(), haar_scaling_1d())


def separable_wavelets() -> tuple[StepFunction, StepFunction, StepFunction]:
    """The three tensor wavelets (phi x psi, psi x phi, psi x psi)."""
    phi1, psi1 = haar_scaling_1d(), haar_wavelet_1d()
    return tensor(phi1, psi1), tensor(psi1, phi1), tensor(psi1, psi1)


def integer_translation_sign(n: DyadicVec2) -> int:
    """Sign picked up by the base wavelet under translation by -n.

    For an integer vector n, psi(. + n) equals psi when the coordinates of n
    have equal parity and -psi otherwise (equivalently, An stays in Z_2^2 or
    not).  Non-integer input is rejected.
    """
    if not n.is_integral():
        raise ValueError(f"integer vector required, got {n}")
    return 1 if _parity(n.x1) == _parity(n.x2) else -1


def _parity(x: DyadicRational) -> int:
    return x.num % 2 if x.exp == 0 else 0


# -- finite slices of the nested spaces ---------------------------------------


@dataclass(frozen=True)
class SpaceSlice:
    """Orthonormal generators of one space level with supports inside B_t."""

    kind: str  # "quincunx_V" | "quincunx_W" | "separable_V" | "separable_W"
    j: int
    t: int
    shifts: list = field(default_factory=list)
    basis: list = field(default_factory=list)


def _lattice(e: int) -> list[DyadicVec2]:
    return enumerate_shifts(max(0, e))


def quincunx_slice_shifts(j: int, t: int) -> list[DyadicVec2]:
    """Shifts a in I_2^2 whose level-j generator support lies in B_t."""
    bound = _ball_fraction(t)
    shifts = []
    for a in _lattice(t + max(j, 0)):
        img = _apply_quincunx_pow(a, -j)
        if img.norm2() <= bound:
            shifts.append(a)
    return shifts


def separable_slice_shifts(j: int, t: int) -> list[DyadicVec2]:
    bound = _ball_fraction(t + j)
    return [a for a in _lattice(t + j) if a.norm2() <= bound]


def _ball_fraction(n: int):
    from fractions import Fraction

    return Fraction(1 << n) if n >= 0 else Fraction(1, 1 << (-n))


def _apply_quincunx_pow(v: DyadicVec2, k: int) -> DyadicVec2:
    mat = QUINCUNX_A if k >= 0 else QUINCUNX_A_INV
    for _ in range(abs(k)):
        v = mat.apply(v)
    return v


def space_slice(kind: str, j: int, t: int) -> SpaceSlice:
    """Finite orthonormal generator set of one space level.

    Quincunx V/W levels use 2^(j/2) * g(A^j x - a); separable levels use
    2^j * g(2^(-j) x - a) with the three tensor wavelets on W.  An empty
    basis (support bound too small) is returned as such, never as an error.
    """
    if kind == "quincunx_V":
        bases = [scaling_function()]
    elif kind == "quincunx_W":
        bases = [quincunx_wavelet()]
    elif kind == "separable_V":
        bases = [separable_scaling()]
    elif kind == "separable_W":
        bases = list(separable_wavelets())
    else:
        raise ValueError(f"unknown slice kind: {kind!r}")

    quincunx = kind.startswith("quincunx")
    if quincunx:
        dil = [g.dilate_pow(j) for g in bases]
        shifts = quincunx_slice_shifts(j, t)
        scale = 2.0 ** (j / 2)
        offsets = [_apply_quincunx_pow(a, -j) for a in shifts]
    else:
        dil = [g.dilate_dyadic(j) for g in bases]
        shifts = separable_slice_shifts(j, t)
        scale = 2.0**j
        offsets = [
            DyadicVec2(DyadicRational(a.x1.num, a.x1.exp - j) if a.x1.num else _ZERO,
                       DyadicRational(a.x2.num, a.x2.exp - j) if a.x2.num else _ZERO)
            for a in shifts
        ]

    if any(not g.support_is_in_ball(t) for g in dil):
        return SpaceSlice(kind, j, t, [], [])

    basis = [
        lincomb([(scale, g.translate(off))])
        for g in dil
        for off in offsets
    ]
    all_shifts = [a for _ in dil for a in shifts]
    return SpaceSlice(kind, j, t, all_shifts, basis)


# -- verification helpers ------------------------------------------------------


def orthonormality_defect(fns) -> float:
    """Max entrywise deviation of the Gram matrix from the identity."""
    g = gram_matrix(fns)
    return float(np.max(np.abs(g - np.eye(len(g)))))


def max_projection_residual(targets, basis) -> tuple[float, int]:
    """Worst L2 residual of projecting each target onto span(basis).

    Coefficients are plain inner products, so the basis is expected to be
    orthonormal; returns (max residual, index of the worst target).
    """
    _, v, meas = cell_matrix(list(targets) + list(basis))
    tmat, bmat = v[: len(targets)], v[len(targets):]
    coeff = (tmat @ bmat.conj().T) * meas
    resid = tmat - coeff @ bmat
    norms = np.sqrt(np.sum(np.abs(resid) ** 2, axis=1) * meas)
    worst = int(np.argmax(norms))
    return float(norms[worst]), worst


@dataclass
class SquareRootReport:
    """Outcome of comparing one separable step against two quincunx steps."""

    t: int
    tolerance: float
    dims: dict
    v0_max_residual: float
    max_residual: float
    passed: bool
    worst: dict

    def to_dict(self) -> dict:
        return {
            "t": self.t,
            "tolerance": self.tolerance,
            "dims": self.dims,
            "v0_max_residual": self.v0_max_residual,
            "max_residual": self.max_residual,
            "pass": self.passed,
            "worst": self.worst,
        }


def verify_square_root(t: int, tol: float = 1e-10) -> SquareRootReport:
    """Check, on the B_t slice, that one separable level splits into two
    quincunx levels: V_0 coincides in both families and the separable
    wavelet slice equals the orthogonal sum of quincunx wavelet levels 0
    and 1, by reconstructing every generator across the fence both ways.

    At t = 0 only the V_0 identity is checked (the wavelet slices need a
    full unit ball of shifts, so t >= 1 is required for them).
    """
    v0_sep = space_slice("separable_V", 0, t)
    v0_q = space_slice("quincunx_V", 0, t)
    r1, w1 = max_projection_residual(v0_sep.basis, v0_q.basis)
    r2, w2 = max_projection_residual(v0_q.basis, v0_sep.basis)
    v0_res = max(r1, r2)
    dims = {
        "separable_V0": len(v0_sep.basis),
        "quincunx_V0": len(v0_q.basis),
    }
    worst = {}
    if t < 1:
        passed = v0_res < tol and dims["separable_V0"] == dims["quincunx_V0"]
        return SquareRootReport(t, tol, dims, v0_res, v0_res, passed, worst)

    w_sep = space_slice("separable_W", 0, t)
    w_q = space_slice("quincunx_W", 0, t).basis + space_slice("quincunx_W", 1, t).basis
    dims.update(
        {
            "separable_W0": len(w_sep.basis),
            "quincunx_W0": len(space_slice("quincunx_W", 0, t).basis),
            "quincunx_W1": len(space_slice("quincunx_W", 1, t).basis),
        }
    )
    fwd, fwd_idx = max_projection_residual(w_sep.basis, w_q)
    bwd, bwd_idx = max_projection_residual(w_q, w_sep.basis)
    max_res = max(v0_res, fwd, bwd)
    if fwd >= bwd:
        worst = {"direction": "separable_to_quincunx", "index": fwd_idx}
    else:
        worst = {"direction": "quincunx_to_separable", "index": bwd_idx}
    dims_match = dims["separable_W0"] == dims["quincunx_W0"] + dims["quincunx_W1"]
    passed = max_res < tol and dims_match
    return SquareRootReport(t, tol, dims, v0_res, max_res, passed, worst)
