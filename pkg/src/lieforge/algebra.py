"""Generators, elements, bracket tables, and structural checks.

A bracket table stores entries exactly as assigned, keyed by ordered
generator pair.  Lookup for a missing direction extends by the convention's
symmetry (plain: [h,g] = -[g,h]; super: [h,g] = -(-1)^{|g||h|}[g,h]), so a
table given only one side of each pair is always symmetric-consistent, while
a table assigned on both sides, or on a diagonal, can violate the convention
and ``check_alternating`` will say exactly where.

Window-truncated instances never treat a dropped (out-of-window) bracket
result as zero: evaluations touching such a pair raise a boundary flag, and
triple checks skip and count them instead of reporting fake residuals.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Optional

from lieforge.linalg import SparseMatrix, nullspace, rat, rref

EVEN = 0
ODD = 1


@dataclass(frozen=True, order=True)
class GeneratorId:
    """A basis generator: family symbol plus doubled index.

    The index is stored doubled so half-integer indices stay exact ints:
    doubled_index 3 means index 3/2, doubled_index 4 means index 2.
    """

    family: str
    doubled_index: int

    @property
    def index(self) -> Fraction:
        return Fraction(self.doubled_index, 2)

    def index_str(self) -> str:
        if self.doubled_index % 2 == 0:
            return str(self.doubled_index // 2)
        return f"{self.doubled_index}/2"

    def __str__(self) -> str:
        return f"{self.family}[{self.index_str()}]"


def gid(family: str, index) -> GeneratorId:
    """Build a GeneratorId from an actual (possibly half-integer) index."""
    d = rat(index) * 2
    if d.denominator != 1:
        raise ValueError(f"index {index} is not an integer or half-integer")
    return GeneratorId(family, int(d))


class Element:
    """Sparse rational linear combination of generators."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[GeneratorId, object] = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        store: dict[GeneratorId, Fraction] = {}
        for g, c in items:
            f = rat(c)
            if f:
                store[g] = store.get(g, Fraction(0)) + f
                if not store[g]:
                    del store[g]
        self.terms = store

    @classmethod
    def zero(cls) -> "Element":
        return cls()

    @classmethod
    def of(cls, g: GeneratorId, coeff=1) -> "Element":
        return cls({g: coeff})

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        return isinstance(other, Element) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other: "Element") -> "Element":
        out = dict(self.terms)
        for g, c in other.terms.items():
            v = out.get(g, Fraction(0)) + c
            if v:
                out[g] = v
            elif g in out:
                del out[g]
        res = Element.__new__(Element)
        res.terms = out
        return res

    def __sub__(self, other: "Element") -> "Element":
        return self + other.scale(-1)

    def scale(self, c) -> "Element":
        f = rat(c)
        if not f:
            return Element.zero()
        res = Element.__new__(Element)
        res.terms = {g: v * f for g, v in self.terms.items()}
        return res

    def sorted_terms(self) -> list[tuple[GeneratorId, Fraction]]:
        return sorted(self.terms.items(), key=lambda t: t[0])

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for g, c in self.sorted_terms():
            if c == 1:
                parts.append(str(g))
            elif c == -1:
                parts.append(f"-{g}")
            else:
                parts.append(f"{c}*{g}")
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self) -> str:
        return f"Element({self})"


class BracketTable:
    """Structure constants stored exactly as assigned.

    ``parity`` maps family symbol to 0 (even) or 1 (odd); unlisted families
    are even.  ``convention`` is "plain" or "super".
    """

    def __init__(self, parity: Mapping[str, int] = (), convention: str = "plain"):
        if convention not in ("plain", "super"):
            raise ValueError(f"unknown convention {convention!r}")
        self.parity = dict(parity.items() if isinstance(parity, Mapping) else parity)
        self.convention = convention
        self.raw: dict[tuple[GeneratorId, GeneratorId], Element] = {}

    def family_parity(self, family: str) -> int:
        return self.parity.get(family, EVEN)

    def swap_sign(self, g: GeneratorId, h: GeneratorId) -> int:
        """Sign s with [h,g] = s*[g,h] under this table's convention."""
        if self.convention == "super":
            if self.family_parity(g.family) and self.family_parity(h.family):
                return 1
        return -1

    def assign(self, g: GeneratorId, h: GeneratorId, value: Element) -> None:
        if (g, h) in self.raw:
            raise ValueError(f"duplicate bracket entry for ({g}, {h})")
        self.raw[(g, h)] = value

    def add_to(self, g: GeneratorId, h: GeneratorId, value: Element) -> None:
        cur = self.raw.get((g, h))
        self.raw[(g, h)] = value if cur is None else cur + value

    def value(self, g: GeneratorId, h: GeneratorId) -> Element:
        """[g,h] as stored, extending a one-sided entry by symmetry."""
        v = self.raw.get((g, h))
        if v is not None:
            return v
        w = self.raw.get((h, g))
        if w is not None:
            return w.scale(self.swap_sign(h, g))
        return Element.zero()


@dataclass(frozen=True)
class Finding:
    """One structured diagnostic: stable code, location string, detail."""

    code: str
    location: str
    detail: str

    def as_dict(self) -> dict:
        return {"code": self.code, "location": self.location, "detail": self.detail}


class AlgebraInstance:
    """A finite-dimensional algebra given by structure constants.

    ``window`` bounds |generator index| for truncations of graded algebras
    (None for genuinely finite algebras).  ``boundary_pairs`` records the
    ordered generator pairs whose bracket lost at least one out-of-window
    term at instantiation time; ``dropped_terms`` counts the lost terms.
    """

    def __init__(
        self,
        name: str,
        generators: Iterable[GeneratorId],
        table: BracketTable,
        window: Optional[int] = None,
        interior_margin: int = 2,
        boundary_pairs: Iterable[tuple[GeneratorId, GeneratorId]] = (),
        dropped_terms: int = 0,
        findings: Iterable[Finding] = (),
        metadata: Optional[dict] = None,
    ):
        self.name = name
        self.generators = list(generators)
        self.table = table
        self.window = window
        self.interior_margin = interior_margin
        self.boundary_pairs = set(boundary_pairs)
        self.dropped_terms = dropped_terms
        self.findings = list(findings)
        self.metadata = metadata or {}
        self._pos = {g: i for i, g in enumerate(self.generators)}
        if len(self._pos) != len(self.generators):
            raise ValueError("duplicate generators")
        for (g, h), v in table.raw.items():
            for t in (g, h, *v.terms):
                if t not in self._pos:
                    raise ValueError(f"table references unknown generator {t}")
        if window is not None:
            for g in self.generators:
                if abs(g.doubled_index) > 2 * window:
                    raise ValueError(f"generator {g} outside window {window}")

    @property
    def dim(self) -> int:
        return len(self.generators)

    def position(self, g: GeneratorId) -> int:
        try:
            return self._pos[g]
        except KeyError:
            raise ValueError(f"unknown generator {g}") from None

    def is_interior(self, g: GeneratorId) -> bool:
        if self.window is None:
            return True
        return abs(g.doubled_index) <= 2 * (self.window - self.interior_margin)

    def interior_generators(self) -> list[GeneratorId]:
        return [g for g in self.generators if self.is_interior(g)]

    def pair_flagged(self, g: GeneratorId, h: GeneratorId) -> bool:
        return (g, h) in self.boundary_pairs or (h, g) in self.boundary_pairs

    def coords(self, x: Element) -> list[Fraction]:
        v = [Fraction(0)] * self.dim
        for g, c in x.terms.items():
            v[self.position(g)] = c
        return v

    def from_coords(self, v: Iterable) -> Element:
        return Element(
            {g: c for g, c in zip(self.generators, v) if rat(c)}
        )


def finite_instance(
    name: str,
    generators: Iterable[GeneratorId],
    entries: Mapping[tuple[GeneratorId, GeneratorId], Element],
    parity: Mapping[str, int] = (),
    convention: str = "plain",
) -> AlgebraInstance:
    """Build a windowless instance from explicit as-written entries."""
    table = BracketTable(parity, convention)
    for (g, h), v in entries.items():
        table.assign(g, h, v)
    return AlgebraInstance(name, generators, table)


def bracket(A: AlgebraInstance, x: Element, y: Element) -> tuple[Element, bool]:
    """Bilinear extension of the table; the flag reports whether any
    generator-pair evaluation had dropped out-of-window terms."""
    acc = Element.zero()
    flagged = False
    for g, cg in x.terms.items():
        A.position(g)
        for h, ch in y.terms.items():
            A.position(h)
            if A.pair_flagged(g, h):
                flagged = True
            v = A.table.value(g, h)
            if v:
                acc = acc + v.scale(cg * ch)
    return acc, flagged


@dataclass(frozen=True)
class AlternatingViolation:
    left: GeneratorId
    right: GeneratorId
    residual: Element

    def describe(self) -> str:
        return f"([{self.left},{self.right}]) residual {self.residual}"


def check_alternating(A: AlgebraInstance) -> list[AlternatingViolation]:
    """Check the convention's symmetry axiom on every assigned pair.

    For a pair stored in both directions the two entries must satisfy
    [h,g] = s*[g,h]; a diagonal entry (g,g) must satisfy (1-s)*[g,g] = 0,
    which constrains it to zero except for odd generators under super.
    """
    table = A.table
    seen: set[tuple[GeneratorId, GeneratorId]] = set()
    out = []
    for (g, h) in table.raw:
        a, b = (g, h) if A.position(g) <= A.position(h) else (h, g)
        if (a, b) in seen:
            continue
        seen.add((a, b))
        s = table.swap_sign(a, b)
        if a == b:
            residual = table.raw[(a, a)].scale(1 - s)
        else:
            v_ab = table.raw.get((a, b))
            v_ba = table.raw.get((b, a))
            if v_ab is None or v_ba is None:
                continue
            residual = v_ba - v_ab.scale(s)
        if residual:
            out.append(AlternatingViolation(a, b, residual))
    out.sort(key=lambda v: (A.position(v.left), A.position(v.right)))
    return out


@dataclass(frozen=True)
class JacobiViolation:
    triple: tuple[GeneratorId, GeneratorId, GeneratorId]
    residual: Element

    def describe(self) -> str:
        x, y, z = self.triple
        return f"({x},{y},{z}) residual {self.residual}"


@dataclass
class JacobiAudit:
    scope: str
    convention: str
    examined: int
    skipped_boundary: int
    violations: list[JacobiViolation]


def jacobi_audit(A: AlgebraInstance, scope: str = "interior") -> JacobiAudit:
    """Evaluate the (graded) Jacobi identity on generator triples.

    Plain convention: J(x,y,z) = [x,[y,z]] + [y,[z,x]] + [z,[x,y]] over
    distinct triples.  Super convention: the graded cyclic sum with signs
    (-1)^{|x||z|}, over triples with repetition (a repeated odd generator is
    a real constraint there).  Triples touching a boundary-flagged pair are
    skipped and counted, never scored as violations.
    """
    if scope not in ("interior", "all"):
        raise ValueError(f"unknown scope {scope!r}")
    gens = A.interior_generators() if scope == "interior" else list(A.generators)
    table = A.table
    sup = table.convention == "super"
    if sup:
        triples = itertools.combinations_with_replacement(gens, 3)
    else:
        triples = itertools.combinations(gens, 3)
    examined = 0
    skipped = 0
    violations = []
    for x, y, z in triples:
        total = Element.zero()
        bad = False
        for a, b, c in ((x, y, z), (y, z, x), (z, x, y)):
            if A.pair_flagged(b, c):
                bad = True
                break
            inner = table.value(b, c)
            part = Element.zero()
            hit = False
            for g, coeff in inner.terms.items():
                if A.pair_flagged(a, g):
                    hit = True
                    break
                part = part + table.value(a, g).scale(coeff)
            if hit:
                bad = True
                break
            if sup:
                pa = table.family_parity(a.family)
                pc = table.family_parity(c.family)
                if pa and pc:
                    part = part.scale(-1)
            total = total + part
        if bad:
            skipped += 1
            continue
        examined += 1
        if total:
            violations.append(JacobiViolation((x, y, z), total))
    return JacobiAudit(
        scope, table.convention, examined, skipped, violations
    )


def check_jacobi(A: AlgebraInstance, scope: str = "interior") -> list[JacobiViolation]:
    return jacobi_audit(A, scope).violations


def center(A: AlgebraInstance) -> list[Element]:
    """Basis of {x in interior span : [x,g] = 0 for all interior g}.

    Constraints use in-window bracket components only; the truncation caveat
    is visible through the instance's boundary data, not silently absorbed.
    """
    cols = A.interior_generators()
    col_pos = {g: i for i, g in enumerate(cols)}
    entries: dict[tuple[int, int], Fraction] = {}
    row_of: dict[tuple[GeneratorId, GeneratorId], int] = {}
    for h in cols:
        for g in cols:
            v = A.table.value(h, g)
            for t, c in v.terms.items():
                key = (g, t)
                if key not in row_of:
                    row_of[key] = len(row_of)
                entries[(row_of[key], col_pos[h])] = entries.get(
                    (row_of[key], col_pos[h]), Fraction(0)
                ) + c
    m = SparseMatrix(max(len(row_of), 1), len(cols), entries)
    return [
        Element({g: c for g, c in zip(cols, v) if c}) for v in nullspace(m)
    ]


def _span_basis(A: AlgebraInstance, vectors: list[Element]) -> list[Element]:
    """Canonical basis of the span of the given elements."""
    if not vectors:
        return []
    entries = {}
    for r, v in enumerate(vectors):
        for g, c in v.terms.items():
            entries[(r, A.position(g))] = c
    ech = rref(SparseMatrix(len(vectors), A.dim, entries))
    return [
        Element({A.generators[c]: v for c, v in row.items()}) for row in ech.rows
    ]


def derived_subalgebra(A: AlgebraInstance) -> list[Element]:
    """Canonical basis of span{[g,h]} over all assigned pairs (in-window)."""
    values = [v for v in A.table.raw.values() if v]
    return _span_basis(A, values)


def is_two_step_solvable(A: AlgebraInstance) -> bool:
    """True iff the derived subalgebra is abelian: [[g,h],[g',h']] = 0."""
    der = derived_subalgebra(A)
    for u, v in itertools.combinations_with_replacement(der, 2):
        w, _ = bracket(A, u, v)
        if w:
            return False
    return True
