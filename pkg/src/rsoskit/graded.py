"""Groupoid-graded vector spaces of finite type and their block morphisms.

A graded space assigns a finite-dimensional vector space to finitely many
arrows; a morphism is a family of matrices indexed by arrows.  The tensor
product sums over arrow factorizations,

    (V (x) W)_gamma = (+)_{beta o alpha = gamma} V_alpha (x) W_beta,

with the summands laid out in a canonical order (intermediate object, then
first-factor shift, lexicographically).  Every basis vector carries a label
recording how it was built, so spaces related by reassociation or unit
insertion can be aligned by a permutation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import ContextMismatch, ShapeMismatch
from .groupoid import (Arrow, Context, WeightPoint, compose, identity_arrow,
                       inverse)


@dataclass(frozen=True)
class Atom:
    """Basis vector `index` of an atomic component at `arrow`."""

    arrow: Arrow
    index: int
    unit: bool = False  # marks basis vectors of the tensor unit


@dataclass(frozen=True)
class Pair:
    """Basis vector ell_left (x) ell_right of a tensor summand."""

    left: "Label"
    right: "Label"


@dataclass(frozen=True)
class Dual:
    """Dual basis vector of a label of the underlying space."""

    of: "Label"


Label = Union[Atom, Pair, Dual]


def label_arrow(label: Label) -> Arrow:
    if isinstance(label, Atom):
        return label.arrow
    if isinstance(label, Pair):
        return compose(label_arrow(label.right), label_arrow(label.left))
    return inverse(label_arrow(label.of))


def flatten(label: Label) -> tuple:
    """Atomic constituents in order, skipping tensor-unit factors."""
    if isinstance(label, Atom):
        return () if label.unit else (label,)
    if isinstance(label, Pair):
        return flatten(label.left) + flatten(label.right)
    return (label,)  # dual labels are opaque atoms


@dataclass(frozen=True)
class Summand:
    """One factorization slot inside a tensor-product component."""

    left: Arrow
    right: Arrow
    offset: int
    size: int


@dataclass
class GradedSpace:
    """Finite-type graded vector space: arrow -> dimension, with basis labels."""

    context: Context
    dims: dict[Arrow, int]
    basis: dict[Arrow, tuple[Label, ...]]
    layout: dict[Arrow, tuple[Summand, ...]] | None = None

    @classmethod
    def from_dims(cls, context: Context, dims: dict[Arrow, int]) -> "GradedSpace":
        for arrow, d in dims.items():
            if d < 1:
                raise ValueError(f"stored dimension must be >= 1 at {arrow!r}")
        basis = {
            arrow: tuple(Atom(arrow, k) for k in range(d))
            for arrow, d in dims.items()
        }
        return cls(context=context, dims=dict(dims), basis=basis)

    def dim(self, arrow: Arrow) -> int:
        return self.dims.get(arrow, 0)

    @property
    def arrows(self) -> list[Arrow]:
        return sorted(self.dims, key=Arrow.sort_key)

    def objects(self) -> list[WeightPoint]:
        pts = {g.source for g in self.dims} | {g.target for g in self.dims}
        return sorted(pts, key=WeightPoint.sort_key)

    def total_dim(self) -> int:
        return sum(self.dims.values())

    def basis_position(self, arrow: Arrow, label: Label) -> int:
        return self.basis[arrow].index(label)

    def to_json_dict(self) -> dict:
        comps = []
        for arrow in self.arrows:
            comps.append({
                "source": _coords_json(arrow.source),
                "shift": list(arrow.shift),
                "dim": self.dims[arrow],
            })
        return {"rank": self.context.rank, "kind": self.context.kind,
                "components": comps}


def _coords_json(point: WeightPoint):
    if point.has_zero_base:
        return [int(o) for o in point.offset]
    return [[complex(v).real, complex(v).imag] for v in point.values()]


def unit_space(context: Context, points: list[WeightPoint]) -> GradedSpace:
    """Tensor unit: one-dimensional at the identity arrow of each point."""
    dims, basis = {}, {}
    for a in points:
        arrow = identity_arrow(a)
        dims[arrow] = 1
        basis[arrow] = (Atom(arrow, 0, unit=True),)
    return GradedSpace(context=context, dims=dims, basis=basis)


def _require_same_context(a, b):
    if a.context != b.context:
        raise ContextMismatch(f"{a.context} != {b.context}")


def tensor_space(V: GradedSpace, W: GradedSpace) -> GradedSpace:
    """Tensor product summing over arrow factorizations."""
    _require_same_context(V, W)
    by_source: dict[WeightPoint, list[Arrow]] = {}
    for beta in W.dims:
        by_source.setdefault(beta.source, []).append(beta)
    pieces: dict[Arrow, list[tuple[Arrow, Arrow]]] = {}
    for alpha in V.dims:
        for beta in by_source.get(alpha.target, []):
            gamma = compose(beta, alpha)
            pieces.setdefault(gamma, []).append((alpha, beta))
    dims, basis, layout = {}, {}, {}
    for gamma, pairs in pieces.items():
        pairs.sort(key=lambda ab: (ab[0].target.sort_key(), ab[0].shift))
        labels: list[Label] = []
        summands: list[Summand] = []
        offset = 0
        for alpha, beta in pairs:
            size = V.dims[alpha] * W.dims[beta]
            summands.append(Summand(alpha, beta, offset, size))
            for lv in V.basis[alpha]:
                for lw in W.basis[beta]:
                    labels.append(Pair(lv, lw))
            offset += size
        dims[gamma] = offset
        basis[gamma] = tuple(labels)
        layout[gamma] = tuple(summands)
    return GradedSpace(context=V.context, dims=dims, basis=basis, layout=layout)


def tensor_many(spaces: list[GradedSpace]) -> GradedSpace:
    out = spaces[0]
    for s in spaces[1:]:
        out = tensor_space(out, s)
    return out


@dataclass
class GradedMorphism:
    """Family of matrices f_gamma : domain_gamma -> codomain_gamma."""

    domain: GradedSpace
    codomain: GradedSpace
    blocks: dict[Arrow, np.ndarray]

    def __post_init__(self):
        for arrow, m in self.blocks.items():
            want = (self.codomain.dim(arrow), self.domain.dim(arrow))
            if m.shape != want:
                raise ShapeMismatch(
                    f"block at {arrow!r} has shape {m.shape}, expected {want}"
                )

    def block(self, arrow: Arrow) -> np.ndarray:
        m = self.blocks.get(arrow)
        if m is not None:
            return m
        return np.zeros((self.codomain.dim(arrow), self.domain.dim(arrow)),
                        dtype=complex)

    def compose(self, other: "GradedMorphism") -> "GradedMorphism":
        """self o other (apply `other` first)."""
        if other.codomain.dims != self.domain.dims:
            raise ShapeMismatch("composition: inner spaces do not match")
        blocks = {}
        for arrow in set(self.blocks) & set(other.blocks):
            m = self.blocks[arrow] @ other.blocks[arrow]
            if m.size and np.abs(m).max() > 0:
                blocks[arrow] = m
        return GradedMorphism(other.domain, self.codomain, blocks)

    def __matmul__(self, other: "GradedMorphism") -> "GradedMorphism":
        return self.compose(other)

    def add(self, other: "GradedMorphism") -> "GradedMorphism":
        if (other.domain.dims != self.domain.dims
                or other.codomain.dims != self.codomain.dims):
            raise ShapeMismatch("addition: spaces do not match")
        blocks = {}
        for arrow in set(self.blocks) | set(other.blocks):
            blocks[arrow] = self.block(arrow) + other.block(arrow)
        return GradedMorphism(self.domain, self.codomain, blocks)

    def __add__(self, other):
        return self.add(other)

    def scale(self, c: complex) -> "GradedMorphism":
        return GradedMorphism(self.domain, self.codomain,
                              {g: c * m for g, m in self.blocks.items()})

    def __rmul__(self, c: complex):
        return self.scale(c)

    def max_diff(self, other: "GradedMorphism") -> float:
        worst = 0.0
        for arrow in set(self.blocks) | set(other.blocks):
            d = self.block(arrow) - other.block(arrow)
            if d.size:
                worst = max(worst, float(np.abs(d).max()))
        return worst

    def allclose(self, other: "GradedMorphism", tol: float = 1e-12) -> bool:
        return self.max_diff(other) <= tol

    def is_identity(self, tol: float = 1e-12) -> bool:
        return self.max_diff(identity_morphism(self.domain)) <= tol

    def to_json_dict(self) -> dict:
        out = []
        for arrow in sorted(self.blocks, key=Arrow.sort_key):
            m = self.blocks[arrow]
            out.append({
                "source": _coords_json(arrow.source),
                "shift": list(arrow.shift),
                "block": [[[v.real, v.imag] for v in row] for row in m.tolist()],
            })
        return {"blocks": out}


def identity_morphism(V: GradedSpace) -> GradedMorphism:
    return GradedMorphism(V, V, {g: np.eye(d, dtype=complex)
                                 for g, d in V.dims.items()})


def align(src: GradedSpace, dst: GradedSpace) -> GradedMorphism:
    """Permutation morphism matching basis vectors by flattened labels.

    Defined when src and dst have the same components up to reassociation
    and insertion/removal of tensor-unit factors.
    """
    _require_same_context(src, dst)
    if set(src.dims) != set(dst.dims):
        raise ShapeMismatch("alignment: component arrows differ")
    blocks = {}
    for arrow, d in src.dims.items():
        if dst.dims[arrow] != d:
            raise ShapeMismatch(f"alignment: dimension mismatch at {arrow!r}")
        pos = {flatten(lbl): k for k, lbl in enumerate(dst.basis[arrow])}
        m = np.zeros((d, d), dtype=complex)
        for col, lbl in enumerate(src.basis[arrow]):
            key = flatten(lbl)
            if key not in pos:
                raise ShapeMismatch(f"alignment: unmatched basis vector at {arrow!r}")
            m[pos[key], col] = 1.0
        blocks[arrow] = m
    return GradedMorphism(src, dst, blocks)


def tensor_morphism(f: GradedMorphism, g: GradedMorphism) -> GradedMorphism:
    """f (x) g acting summand-wise by Kronecker products."""
    dom = tensor_space(f.domain, g.domain)
    cod = tensor_space(f.codomain, g.codomain)
    blocks = {}
    for gamma, cod_summands in (cod.layout or {}).items():
        if gamma not in dom.dims:
            continue
        dom_index = {(s.left, s.right): s for s in dom.layout[gamma]}
        m = np.zeros((cod.dims[gamma], dom.dims[gamma]), dtype=complex)
        touched = False
        for cs in cod_summands:
            ds = dom_index.get((cs.left, cs.right))
            if ds is None:
                continue
            fb = f.blocks.get(cs.left)
            gb = g.blocks.get(cs.right)
            if fb is None or gb is None:
                continue
            m[cs.offset:cs.offset + cs.size,
              ds.offset:ds.offset + ds.size] = np.kron(fb, gb)
            touched = True
        if touched:
            blocks[gamma] = m
    return GradedMorphism(dom, cod, blocks)


@dataclass
class DualityData:
    """Dual space with the coevaluation 1 -> V (x) V* and evaluation V* (x) V -> 1."""

    dual: GradedSpace
    coevaluation: GradedMorphism
    evaluation: GradedMorphism


def dual_space(V: GradedSpace) -> DualityData:
    dims, basis = {}, {}
    for gamma, d in V.dims.items():
        gi = inverse(gamma)
        dims[gi] = d
        basis[gi] = tuple(Dual(lbl) for lbl in V.basis[gamma])
    dual = GradedSpace(context=V.context, dims=dims, basis=basis)

    points = V.objects()
    one = unit_space(V.context, points)

    vxd = tensor_space(V, dual)
    coev_blocks = {}
    for a in points:
        ida = identity_arrow(a)
        if ida not in vxd.dims:
            continue
        col = np.zeros((vxd.dims[ida], 1), dtype=complex)
        for s in vxd.layout[ida]:
            if s.right != inverse(s.left):
                continue
            d = V.dims[s.left]
            for k in range(d):
                col[s.offset + k * d + k, 0] = 1.0
        coev_blocks[ida] = col
    coevaluation = GradedMorphism(one, vxd, coev_blocks)

    dxv = tensor_space(dual, V)
    ev_blocks = {}
    for a in points:
        ida = identity_arrow(a)
        if ida not in dxv.dims:
            continue
        row = np.zeros((1, dxv.dims[ida]), dtype=complex)
        for s in dxv.layout[ida]:
            if s.right != inverse(s.left):
                continue
            d = dual.dims[s.left]
            for k in range(d):
                row[0, s.offset + k * d + k] = 1.0
        ev_blocks[ida] = row
    evaluation = GradedMorphism(dxv, one, ev_blocks)

    return DualityData(dual=dual, coevaluation=coevaluation, evaluation=evaluation)


def zigzag_residual(V: GradedSpace, duality: DualityData | None = None) -> float:
    """Deviation of the two triangle composites from the identity."""
    dd = duality or dual_space(V)
    one = dd.coevaluation.domain
    # V = 1 (x) V -> (V (x) V*) (x) V = V (x) (V* (x) V) -> V (x) 1 = V
    left_host = tensor_space(one, V)
    step1 = tensor_morphism(dd.coevaluation, identity_morphism(V))
    mid = align(step1.codomain, tensor_space(V, tensor_space(dd.dual, V)))
    step2 = tensor_morphism(identity_morphism(V), dd.evaluation)
    chain = step2 @ align(mid.codomain, step2.domain) @ mid @ step1
    first = (align(chain.codomain, V) @ chain @ align(V, left_host))
    res = first.max_diff(identity_morphism(V))
    # V* = V* (x) 1 -> V* (x) (V (x) V*) = (V* (x) V) (x) V* -> 1 (x) V* = V*
    right_host = tensor_space(dd.dual, one)
    step1 = tensor_morphism(identity_morphism(dd.dual), dd.coevaluation)
    mid = align(step1.codomain,
                tensor_space(tensor_space(dd.dual, V), dd.dual))
    step2 = tensor_morphism(dd.evaluation, identity_morphism(dd.dual))
    chain = step2 @ align(mid.codomain, step2.domain) @ mid @ step1
    second = (align(chain.codomain, dd.dual) @ chain @ align(dd.dual, right_host))
    return max(res, second.max_diff(identity_morphism(dd.dual)))
