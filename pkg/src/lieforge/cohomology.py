"""Derivations, 2-cocycles, coboundaries, H2, and central extensions.

All spaces are computed as exact nullspaces or column spans over the
rationals.  On window-truncated instances every constraint whose data was
clipped by the window (a boundary-flagged pair) is skipped and counted, so
truncation can shrink the constraint set but never fabricates or deletes
solutions silently.  Super-convention cochains are graded-skew with the
same swap sign as the bracket; parity-mixing pairs are allowed and their
verdicts reported without interpreting the grading.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Union

from lieforge.algebra import (
    AlgebraInstance,
    BracketTable,
    Element,
    Finding,
    GeneratorId,
)
from lieforge.linalg import SparseMatrix, nullspace, rank, rat, rref


class LinearEndo:
    """Linear self-map in the generator basis: column j holds the image of
    generator j."""

    __slots__ = ("matrix",)

    def __init__(self, matrix: list[list]):
        n = len(matrix)
        if any(len(row) != n for row in matrix):
            raise ValueError("matrix must be square")
        self.matrix = [[rat(v) for v in row] for row in matrix]

    @property
    def dim(self) -> int:
        return len(self.matrix)

    @classmethod
    def identity(cls, n: int) -> "LinearEndo":
        return cls(
            [[Fraction(1) if i == j else Fraction(0) for j in range(n)] for i in range(n)]
        )

    @classmethod
    def from_images(
        cls, A: AlgebraInstance, images: Mapping[GeneratorId, Element]
    ) -> "LinearEndo":
        """Build a map from generator images; unlisted generators map to 0."""
        n = A.dim
        m = [[Fraction(0)] * n for _ in range(n)]
        for g, img in images.items():
            j = A.position(g)
            for t, c in img.terms.items():
                m[A.position(t)][j] = c
        return cls(m)

    def image_of(self, A: AlgebraInstance, g: GeneratorId) -> Element:
        j = A.position(g)
        return Element(
            {A.generators[i]: self.matrix[i][j] for i in range(self.dim)}
        )

    def apply(self, A: AlgebraInstance, x: Element) -> Element:
        out = Element.zero()
        for g, c in x.terms.items():
            out = out + self.image_of(A, g).scale(c)
        return out

    def compose(self, other: "LinearEndo") -> "LinearEndo":
        n = self.dim
        if other.dim != n:
            raise ValueError("dimension mismatch")
        a, b = self.matrix, other.matrix
        return LinearEndo(
            [
                [sum((a[i][k] * b[k][j] for k in range(n)), Fraction(0)) for j in range(n)]
                for i in range(n)
            ]
        )

    def flat(self) -> list[Fraction]:
        return [v for row in self.matrix for v in row]

    def __eq__(self, other) -> bool:
        return isinstance(other, LinearEndo) and self.matrix == other.matrix


class Cochain2:
    """Scalar-valued bilinear 2-cochain stored on ordered pairs as written.

    Lookup extends one-sided entries by the convention's symmetry (skew for
    plain, graded-skew for super); ``symmetry_violations`` reports stored
    pairs that contradict it, so as-written data remains auditable.
    """

    __slots__ = ("parity", "convention", "raw")

    def __init__(
        self,
        parity: Mapping[str, int] = (),
        convention: str = "plain",
        raw: Union[Mapping, Iterable] = (),
    ):
        if convention not in ("plain", "super"):
            raise ValueError(f"unknown convention {convention!r}")
        self.parity = dict(parity.items() if isinstance(parity, Mapping) else parity)
        self.convention = convention
        items = raw.items() if isinstance(raw, Mapping) else raw
        store: dict[tuple[GeneratorId, GeneratorId], Fraction] = {}
        for (g, h), v in items:
            f = rat(v)
            if f:
                store[(g, h)] = f
        self.raw = store

    def swap_sign(self, g: GeneratorId, h: GeneratorId) -> int:
        if self.convention == "super":
            if self.parity.get(g.family, 0) and self.parity.get(h.family, 0):
                return 1
        return -1

    def value(self, g: GeneratorId, h: GeneratorId) -> Fraction:
        v = self.raw.get((g, h))
        if v is not None:
            return v
        w = self.raw.get((h, g))
        if w is not None:
            return self.swap_sign(h, g) * w
        return Fraction(0)

    def symmetry_violations(self) -> list[tuple[GeneratorId, GeneratorId, Fraction]]:
        """Stored pairs violating the symmetry: (g, h, residual) with
        residual = stored(h,g) - s*stored(g,h), or (1-s)*stored(g,g)."""
        out = []
        seen = set()
        for (g, h) in sorted(self.raw, key=lambda p: (p[0], p[1])):
            key = tuple(sorted((g, h)))
            if key in seen:
                continue
            seen.add(key)
            a, b = key
            s = self.swap_sign(a, b)
            if a == b:
                residual = (1 - s) * self.raw[(a, a)]
            else:
                va = self.raw.get((a, b))
                vb = self.raw.get((b, a))
                if va is None or vb is None:
                    continue
                residual = vb - s * va
            if residual:
                out.append((a, b, residual))
        return out

    def support(self) -> list[tuple[GeneratorId, GeneratorId]]:
        return sorted(self.raw, key=lambda p: (p[0], p[1]))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Cochain2)
            and self.convention == other.convention
            and self.raw == other.raw
        )


def ad_matrix(A: AlgebraInstance, x: Union[GeneratorId, Element]) -> LinearEndo:
    """The map ad_x = [x, -] in the generator basis."""
    if isinstance(x, GeneratorId):
        x = Element.of(x)
    n = A.dim
    m = [[Fraction(0)] * n for _ in range(n)]
    for j, h in enumerate(A.generators):
        img = Element.zero()
        for g, c in x.terms.items():
            img = img + A.table.value(g, h).scale(c)
        for t, c in img.terms.items():
            m[A.position(t)][j] = c
    return LinearEndo(m)


def _pair_iter(A: AlgebraInstance):
    """Unordered generator pairs; diagonals included under super (an odd
    generator may bracket with itself)."""
    if A.table.convention == "super":
        return itertools.combinations_with_replacement(A.generators, 2)
    return itertools.combinations(A.generators, 2)


def _grade_key(shift: Optional[Fraction], g: GeneratorId, h: GeneratorId) -> bool:
    return shift is None or h.index - g.index == shift


def derivation_space(
    A: AlgebraInstance, grade_restriction: Optional[object] = None
) -> list[LinearEndo]:
    """Basis of {D : D[g,h] = [Dg,h] + [g,Dh] on every checkable pair}.

    grade_restriction = r keeps only matrix entries sending a generator of
    index i to generators of index i + r (r = 0 gives grade-preserving
    maps).  Under the super convention entries always stay parity-pure:
    mixing parities would need sign conventions the audited identities do
    not define.  Pairs with window-clipped brackets are skipped.
    """
    shift = None if grade_restriction is None else rat(grade_restriction)
    gens = A.generators
    n = A.dim
    par = A.table.family_parity
    sup = A.table.convention == "super"

    unknowns: dict[tuple[int, int], int] = {}
    for j, g in enumerate(gens):
        for i, t in enumerate(gens):
            if shift is not None and t.index - g.index != shift:
                continue
            if sup and par(t.family) != par(g.family):
                continue
            unknowns[(i, j)] = len(unknowns)
    if not unknowns:
        return []

    rows: list[dict[int, Fraction]] = []
    for a, b in _pair_iter(A):
        if A.pair_flagged(a, b):
            continue
        ja, jb = A.position(a), A.position(b)
        usable = True
        for i, t in enumerate(gens):
            if (i, ja) in unknowns and A.pair_flagged(t, b):
                usable = False
                break
            if (i, jb) in unknowns and A.pair_flagged(a, t):
                usable = False
                break
        if not usable:
            continue
        # componentwise D(v) - [Da,b] - [a,Db] = 0, one row per component
        comp: dict[int, dict[int, Fraction]] = {}

        def put(component: int, key: tuple[int, int], c: Fraction):
            u = unknowns.get(key)
            if u is None:
                return
            row = comp.setdefault(component, {})
            row[u] = row.get(u, Fraction(0)) + c
            if not row[u]:
                del row[u]

        for t, c in A.table.value(a, b).terms.items():
            jt = A.position(t)
            for i in range(n):
                put(i, (i, jt), c)
        for i, t in enumerate(gens):
            if (i, ja) in unknowns:
                for u, cu in A.table.value(t, b).terms.items():
                    put(A.position(u), (i, ja), -cu)
            if (i, jb) in unknowns:
                for u, cu in A.table.value(a, t).terms.items():
                    put(A.position(u), (i, jb), -cu)
        rows.extend(r for r in comp.values() if r)

    entries = {
        (r, u): v for r, row in enumerate(rows) for u, v in row.items()
    }
    m = SparseMatrix(max(len(rows), 1), len(unknowns), entries)
    basis = []
    index_of = {u: key for key, u in unknowns.items()}
    for vec in nullspace(m):
        mat = [[Fraction(0)] * n for _ in range(n)]
        for u, val in enumerate(vec):
            if val:
                i, j = index_of[u]
                mat[i][j] = val
        basis.append(LinearEndo(mat))
    return basis


def check_derivation(
    A: AlgebraInstance, D: LinearEndo
) -> list[tuple[GeneratorId, GeneratorId, Element]]:
    """Pairs where D[g,h] != [Dg,h] + [g,Dh], with residuals."""
    out = []
    for a, b in _pair_iter(A):
        if A.pair_flagged(a, b):
            continue
        v = A.table.value(a, b)
        lhs = D.apply(A, v)
        rhs = Element.zero()
        skip = False
        for t, c in D.image_of(A, a).terms.items():
            if A.pair_flagged(t, b):
                skip = True
                break
            rhs = rhs + A.table.value(t, b).scale(c)
        if skip:
            continue
        for t, c in D.image_of(A, b).terms.items():
            if A.pair_flagged(a, t):
                skip = True
                break
            rhs = rhs + A.table.value(a, t).scale(c)
        if skip:
            continue
        residual = lhs - rhs
        if residual:
            out.append((a, b, residual))
    return out


def inner_split(
    A: AlgebraInstance,
    ders: list[LinearEndo],
    ad_generators: Optional[list[GeneratorId]] = None,
) -> tuple[int, int]:
    """(inner_dim, outer_dim) for a derivation-space basis.

    inner_dim is the dimension of the intersection of span{ad_g} with the
    given space; when every ad map is itself a derivation (Jacobi holds)
    this equals dim span{ad_g} = dim A - dim center(A).
    """
    if not ders:
        return 0, 0
    gens = ad_generators if ad_generators is not None else A.generators
    ad_vecs = [ad_matrix(A, g).flat() for g in gens]
    der_vecs = [d.flat() for d in ders]

    def rank_of(vectors: list[list[Fraction]]) -> int:
        if not vectors:
            return 0
        entries = {
            (r, c): v
            for r, vec in enumerate(vectors)
            for c, v in enumerate(vec)
            if v
        }
        return rank(SparseMatrix(len(vectors), len(vectors[0]), entries))

    r_ad = rank_of(ad_vecs)
    r_der = rank_of(der_vecs)
    r_union = rank_of(ad_vecs + der_vecs)
    inner = r_ad + r_der - r_union
    return inner, r_der - inner


def _cochain_unknowns(
    A: AlgebraInstance, grade_zero: bool
) -> dict[tuple[GeneratorId, GeneratorId], int]:
    """Canonical unknown slots: unordered pairs (by position), diagonal only
    for odd generators under super, optionally restricted to index-sum 0."""
    sup = A.table.convention == "super"
    par = A.table.family_parity
    out: dict[tuple[GeneratorId, GeneratorId], int] = {}
    for i, g in enumerate(A.generators):
        for j in range(i, A.dim):
            h = A.generators[j]
            if i == j and not (sup and par(g.family)):
                continue
            if grade_zero and g.index + h.index != 0:
                continue
            out[(g, h)] = len(out)
    return out


def _cochain_from_vector(
    A: AlgebraInstance,
    unknowns: dict[tuple[GeneratorId, GeneratorId], int],
    vec: list[Fraction],
) -> Cochain2:
    raw = {}
    for (g, h), u in unknowns.items():
        if vec[u]:
            raw[(g, h)] = vec[u]
    return Cochain2(A.table.parity, A.table.convention, raw)


def _cocycle_rows(A: AlgebraInstance, unknowns, scope: str = "all"):
    """Linear constraint rows of the cyclic cocycle identity, one candidate
    row per triple, expressed over the unknown pair slots."""
    gens = (
        A.interior_generators() if scope == "interior" else list(A.generators)
    )
    sup = A.table.convention == "super"
    par = A.table.family_parity
    triples = (
        itertools.combinations_with_replacement(gens, 3)
        if sup
        else itertools.combinations(gens, 3)
    )
    skipped = 0
    rows = []
    for x, y, z in triples:
        row: dict[int, Fraction] = {}
        bad = False
        for a, b, c in ((x, y, z), (y, z, x), (z, x, y)):
            if A.pair_flagged(a, b):
                bad = True
                break
            sign = 1
            if sup and par(a.family) and par(c.family):
                sign = -1
            for t, ct in A.table.value(a, b).terms.items():
                key = (t, c) if A.position(t) <= A.position(c) else (c, t)
                u = unknowns.get(key)
                if u is None:
                    continue
                s = 1
                if key != (t, c):
                    s = A.table.swap_sign(c, t)
                coeff = sign * ct * s
                row[u] = row.get(u, Fraction(0)) + coeff
                if not row[u]:
                    del row[u]
        if bad:
            skipped += 1
            continue
        if row:
            rows.append(row)
    return rows, skipped


def cocycle2_space(A: AlgebraInstance, grade_zero: bool = False) -> list[Cochain2]:
    """Basis of Z2: cochains with vanishing cyclic sum on all checkable
    triples (graded signs under super)."""
    unknowns = _cochain_unknowns(A, grade_zero)
    if not unknowns:
        return []
    rows, _ = _cocycle_rows(A, unknowns)
    entries = {
        (r, u): v for r, row in enumerate(rows) for u, v in row.items()
    }
    m = SparseMatrix(max(len(rows), 1), len(unknowns), entries)
    return [_cochain_from_vector(A, unknowns, v) for v in nullspace(m)]


def coboundary2_space(A: AlgebraInstance, grade_zero: bool = False) -> list[Cochain2]:
    """Basis of B2 = {delta f : f a 1-cochain}, delta f(x,y) = f([x,y]).

    With grade_zero, f runs over duals of index-0 generators only (the
    grade-preserving 1-cochains), matching the grade-zero Z2 support.
    """
    unknowns = _cochain_unknowns(A, grade_zero)
    if not unknowns:
        return []
    duals = [
        t
        for t in A.generators
        if not grade_zero or t.index == 0
    ]
    vectors = []
    for t in duals:
        vec = [Fraction(0)] * len(unknowns)
        nonzero = False
        for (g, h), u in unknowns.items():
            c = A.table.value(g, h).terms.get(t)
            if c:
                vec[u] = c
                nonzero = True
        if nonzero:
            vectors.append(vec)
    if not vectors:
        return []
    entries = {
        (r, c): v for r, vec in enumerate(vectors) for c, v in enumerate(vec) if v
    }
    ech = rref(SparseMatrix(len(vectors), len(unknowns), entries))
    basis = []
    for row in ech.rows:
        vec = [Fraction(0)] * len(unknowns)
        for c, v in row.items():
            vec[c] = v
        basis.append(_cochain_from_vector(A, unknowns, vec))
    return basis


def h2_dimension(A: AlgebraInstance, grade_zero: bool = False) -> int:
    """dim Z2 - dim B2 (0 immediately for dim <= 1 algebras)."""
    if A.dim <= 1:
        return 0
    return len(cocycle2_space(A, grade_zero)) - len(coboundary2_space(A, grade_zero))


@dataclass(frozen=True)
class CocycleViolation:
    triple: tuple[GeneratorId, GeneratorId, GeneratorId]
    residual: Fraction

    def describe(self) -> str:
        x, y, z = self.triple
        return f"({x},{y},{z}) residual {self.residual}"


@dataclass
class CocycleAudit:
    scope: str
    examined: int
    skipped_boundary: int
    violations: list[CocycleViolation]


def cocycle_audit(
    A: AlgebraInstance, omega: Cochain2, scope: str = "interior"
) -> CocycleAudit:
    """Evaluate the cyclic cocycle identity for a concrete cochain."""
    if scope not in ("interior", "all"):
        raise ValueError(f"unknown scope {scope!r}")
    gens = (
        A.interior_generators() if scope == "interior" else list(A.generators)
    )
    sup = A.table.convention == "super"
    par = A.table.family_parity
    triples = (
        itertools.combinations_with_replacement(gens, 3)
        if sup
        else itertools.combinations(gens, 3)
    )
    examined = 0
    skipped = 0
    violations = []
    for x, y, z in triples:
        total = Fraction(0)
        bad = False
        for a, b, c in ((x, y, z), (y, z, x), (z, x, y)):
            if A.pair_flagged(a, b):
                bad = True
                break
            sign = 1
            if sup and par(a.family) and par(c.family):
                sign = -1
            for t, ct in A.table.value(a, b).terms.items():
                total += sign * ct * omega.value(t, c)
        if bad:
            skipped += 1
            continue
        examined += 1
        if total:
            violations.append(CocycleViolation((x, y, z), total))
    return CocycleAudit(scope, examined, skipped, violations)


def check_cocycle(
    A: AlgebraInstance, omega: Cochain2, scope: str = "interior"
) -> list[CocycleViolation]:
    return cocycle_audit(A, omega, scope).violations


def central_extension(
    A: AlgebraInstance, omega: Cochain2, center_family: str = "Z"
) -> AlgebraInstance:
    """Adjoin a central generator z and twist the bracket by omega:
    [x,y]_ext = [x,y] + omega(x,y) z.  The cochain is not required to be
    closed; Jacobi on the result reports any failure."""
    fam = center_family
    existing = {g.family for g in A.generators}
    k = 0
    while fam in existing:
        k += 1
        fam = f"{center_family}{k}"
    z = GeneratorId(fam, 0)

    parity = dict(A.table.parity)
    parity[fam] = 0
    table = BracketTable(parity, A.table.convention)
    for (g, h), v in A.table.raw.items():
        w = omega.value(g, h)
        table.assign(g, h, (v + Element.of(z, w)) if w else v)
    for (g, h), w in omega.raw.items():
        if (g, h) not in A.table.raw and w:
            table.assign(g, h, Element.of(z, w))

    return AlgebraInstance(
        A.name + "+z",
        list(A.generators) + [z],
        table,
        window=A.window,
        interior_margin=A.interior_margin,
        boundary_pairs=A.boundary_pairs,
        dropped_terms=A.dropped_terms,
        findings=list(A.findings),
        metadata={**A.metadata, "extension_of": A.name, "center_generator": str(z)},
    )
