"""Symplectic Novikov Lie algebra support.

Product tables with 1-based generator indices, the standard symplectic
form, the four identity checks (Novikov right-commutativity, associativity,
form compatibility, symplectic 2-cocycle), an aggregate verifier, central
extensions (standard and the experimental as-written variant), and a
deterministic brute-force structure search over finite coefficient sets.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional, Sequence, Union

from lieforge.algebra import (
    AlgebraInstance,
    BracketTable,
    Element,
    GeneratorId,
    center,
    derived_subalgebra,
    gid,
    is_two_step_solvable,
)
from lieforge.cohomology import Cochain2, central_extension, h2_dimension
from lieforge.linalg import SparseMatrix, rank, rat
from lieforge import specfile


class ProductTable:
    """Left-symmetric product e_i * e_j = sum_k c_ij^k e_k, indices 1-based."""

    __slots__ = ("dim", "family", "entries")

    def __init__(
        self,
        dim: int,
        entries: Union[Mapping, Sequence] = (),
        family: str = "e",
    ):
        if dim < 1:
            raise ValueError("dim must be positive")
        self.dim = dim
        self.family = family
        items = entries.items() if isinstance(entries, Mapping) else entries
        store: dict[tuple[int, int], Element] = {}
        for (i, j), v in items:
            self._check_index(i)
            self._check_index(j)
            for g in v.terms:
                if g.family != family:
                    raise ValueError(f"foreign family {g.family!r} in product value")
                self._check_index(g.index)
            if v:
                store[(i, j)] = v
        self.entries = store

    def _check_index(self, i) -> None:
        if i != int(i) or not 1 <= i <= self.dim:
            raise ValueError(f"generator index {i} out of range 1..{self.dim}")

    @classmethod
    def from_coeffs(
        cls, dim: int, coeffs: Mapping[tuple[int, int, int], object], family: str = "e"
    ) -> "ProductTable":
        entries: dict[tuple[int, int], dict[GeneratorId, Fraction]] = {}
        for (i, j, k), c in coeffs.items():
            f = rat(c)
            if f:
                entries.setdefault((i, j), {})[gid(family, k)] = f
        return cls(dim, {p: Element(t) for p, t in entries.items()}, family)

    def generators(self) -> list[GeneratorId]:
        return [gid(self.family, i) for i in range(1, self.dim + 1)]

    def value(self, i: int, j: int) -> Element:
        return self.entries.get((i, j), Element.zero())

    def coeff(self, i: int, j: int, k: int) -> Fraction:
        return self.value(i, j).terms.get(gid(self.family, k), Fraction(0))

    def mult(self, x: Element, y: Element) -> Element:
        out = Element.zero()
        for g, c in x.terms.items():
            for h, d in y.terms.items():
                out = out + self.value(int(g.index), int(h.index)).scale(c * d)
        return out

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ProductTable)
            and self.dim == other.dim
            and self.family == other.family
            and self.entries == other.entries
        )


class SymplecticForm:
    """Even-dimensional skew-symmetric nondegenerate bilinear form, validated
    at construction."""

    __slots__ = ("dim", "matrix")

    def __init__(self, matrix: Sequence[Sequence]):
        n = len(matrix)
        rows = [[rat(v) for v in row] for row in matrix]
        if any(len(row) != n for row in rows):
            raise ValueError("form matrix must be square")
        if n % 2:
            raise ValueError("symplectic form needs even dimension")
        for i in range(n):
            for j in range(n):
                if rows[i][j] + rows[j][i]:
                    raise ValueError(f"form not skew-symmetric at ({i + 1},{j + 1})")
        entries = {
            (i, j): v for i, row in enumerate(rows) for j, v in enumerate(row) if v
        }
        if n and rank(SparseMatrix(n, n, entries)) != n:
            raise ValueError("form is degenerate")
        self.dim = n
        self.matrix = rows

    def value(self, i: int, j: int) -> Fraction:
        return self.matrix[i - 1][j - 1]

    def pair(self, x: Element, y: Element) -> Fraction:
        total = Fraction(0)
        for g, c in x.terms.items():
            for h, d in y.terms.items():
                total += c * d * self.matrix[int(g.index) - 1][int(h.index) - 1]
        return total

    def __eq__(self, other) -> bool:
        return isinstance(other, SymplecticForm) and self.matrix == other.matrix


def standard_form(n: int) -> SymplecticForm:
    """+1 at (i, j) for i < j with i + j = 2n+1, skew-completed."""
    if n < 1:
        raise ValueError("n must be >= 1")
    d = 2 * n
    m = [[Fraction(0)] * d for _ in range(d)]
    for i in range(1, d + 1):
        j = d + 1 - i
        if i < j:
            m[i - 1][j - 1] = Fraction(1)
            m[j - 1][i - 1] = Fraction(-1)
    return SymplecticForm(m)


@dataclass
class SnlaInstance:
    dim: int
    product: ProductTable
    form: SymplecticForm
    bracket_source: str = "commutator"
    explicit_bracket: Optional[BracketTable] = None

    def __post_init__(self):
        if self.product.dim != self.dim or self.form.dim != self.dim:
            raise ValueError("product/form dimensions do not match")
        if self.bracket_source not in ("commutator", "explicit"):
            raise ValueError(f"unknown bracket_source {self.bracket_source!r}")
        if self.bracket_source == "explicit" and self.explicit_bracket is None:
            raise ValueError("explicit bracket_source needs a table")

    def bracket_table(self) -> BracketTable:
        if self.bracket_source == "explicit":
            return self.explicit_bracket
        return commutator_bracket(self.product)

    def algebra(self, name: str = "snla") -> AlgebraInstance:
        return AlgebraInstance(
            f"{name}{self.dim}", self.product.generators(), self.bracket_table()
        )


def commutator_bracket(p: ProductTable) -> BracketTable:
    """[e_i, e_j] = e_i*e_j - e_j*e_i; alternating by construction."""
    table = BracketTable(convention="plain")
    for i in range(1, p.dim + 1):
        for j in range(i + 1, p.dim + 1):
            v = p.value(i, j) - p.value(j, i)
            if v:
                table.assign(gid(p.family, i), gid(p.family, j), v)
    return table


@dataclass(frozen=True)
class ProductViolation:
    triple: tuple[int, int, int]
    residual: Element

    def describe(self) -> str:
        return f"{self.triple} residual {self.residual}"


@dataclass(frozen=True)
class CompatViolation:
    triple: tuple[int, int, int]
    left: Fraction
    right: Fraction

    def describe(self) -> str:
        return f"{self.triple} left {self.left} right {self.right}"


@dataclass(frozen=True)
class FormCocycleViolation:
    triple: tuple[int, int, int]
    total: Fraction

    def describe(self) -> str:
        return f"{self.triple} cyclic sum {self.total}"


def _basis(p: ProductTable, i: int) -> Element:
    return Element.of(gid(p.family, i))


def check_novikov(p: ProductTable) -> list[ProductViolation]:
    """Triples with (e_i*e_j)*e_k != (e_i*e_k)*e_j."""
    out = []
    r = range(1, p.dim + 1)
    for i, j, k in itertools.product(r, r, r):
        residual = p.mult(p.value(i, j), _basis(p, k)) - p.mult(
            p.value(i, k), _basis(p, j)
        )
        if residual:
            out.append(ProductViolation((i, j, k), residual))
    return out


def check_associative(p: ProductTable) -> list[ProductViolation]:
    """Triples with (e_i*e_j)*e_k != e_i*(e_j*e_k)."""
    out = []
    r = range(1, p.dim + 1)
    for i, j, k in itertools.product(r, r, r):
        residual = p.mult(p.value(i, j), _basis(p, k)) - p.mult(
            _basis(p, i), p.value(j, k)
        )
        if residual:
            out.append(ProductViolation((i, j, k), residual))
    return out


def check_compat(p: ProductTable, f: SymplecticForm) -> list[CompatViolation]:
    """Triples with omega(e_i*e_j, e_k) != omega(e_i, e_j*e_k)."""
    if p.dim != f.dim:
        raise ValueError("product/form dimensions do not match")
    out = []
    r = range(1, p.dim + 1)
    for i, j, k in itertools.product(r, r, r):
        left = f.pair(p.value(i, j), _basis(p, k))
        right = f.pair(_basis(p, i), p.value(j, k))
        if left != right:
            out.append(CompatViolation((i, j, k), left, right))
    return out


def check_symplectic_cocycle(
    f: SymplecticForm, b: BracketTable, family: str = "e"
) -> list[FormCocycleViolation]:
    """Triples i <= j <= k with nonzero cyclic sum omega([x,y],z) +
    omega([y,z],x) + omega([z,x],y).  Repeats are included so non-alternating
    explicit tables stay auditable."""
    out = []
    gens = [gid(family, i) for i in range(1, f.dim + 1)]
    for x, y, z in itertools.combinations_with_replacement(gens, 3):
        total = Fraction(0)
        for a, bb, c in ((x, y, z), (y, z, x), (z, x, y)):
            total += f.pair(b.value(a, bb), Element.of(c))
        if total:
            out.append(
                FormCocycleViolation(
                    (int(x.index), int(y.index), int(z.index)), total
                )
            )
    return out


_CHECK_ORDER = (
    "novikov",
    "associative",
    "compat",
    "symplectic_cocycle",
    "skew",
    "nondegenerate",
    "two_step_solvable",
)


@dataclass
class VerdictReport:
    passed: bool
    violations: dict[str, list]

    def counts(self) -> dict[str, int]:
        return {k: len(v) for k, v in self.violations.items()}


def verify_snla(s: SnlaInstance) -> VerdictReport:
    """Aggregate of every defining identity; passes iff all hold."""
    bracket = s.bracket_table()
    vio: dict[str, list] = {
        "novikov": check_novikov(s.product),
        "associative": check_associative(s.product),
        "compat": check_compat(s.product, s.form),
        "symplectic_cocycle": check_symplectic_cocycle(
            s.form, bracket, s.product.family
        ),
        "skew": [],
        "nondegenerate": [],
        "two_step_solvable": [],
    }
    m = s.form.matrix
    for i in range(s.dim):
        for j in range(i, s.dim):
            if m[i][j] + m[j][i]:
                vio["skew"].append((i + 1, j + 1))
    entries = {
        (i, j): v for i, row in enumerate(m) for j, v in enumerate(row) if v
    }
    if rank(SparseMatrix(s.dim, s.dim, entries)) != s.dim:
        vio["nondegenerate"].append("rank deficient")
    if not is_two_step_solvable(s.algebra()):
        vio["two_step_solvable"].append("derived subalgebra is not abelian")
    return VerdictReport(all(not v for v in vio.values()), vio)


def snla_fingerprint(s: SnlaInstance) -> dict[str, int]:
    """Center/derived/H2 dimensions of the bracket algebra, for manual
    de-duplication of search results."""
    A = s.algebra()
    return {
        "center": len(center(A)),
        "derived": len(derived_subalgebra(A)),
        "h2": h2_dimension(A),
    }


def _slot_list(dim: int) -> list[tuple[int, int, int]]:
    r = range(1, dim + 1)
    return [(i, j, k) for i in r for j in r for k in r]


def _fast_pass(cs: tuple, dim: int, form: list[list[Fraction]]) -> bool:
    """Early-exit coefficient-level version of the verify pipeline, used
    only to pre-filter search candidates; survivors are rebuilt as tables."""
    n = dim

    def c(i, j, k):
        return cs[((i - 1) * n + (j - 1)) * n + (k - 1)]

    rng = range(1, n + 1)
    for i in rng:
        for j in rng:
            for k in rng:
                for l in rng:
                    lhs = sum(c(i, j, t) * c(t, k, l) for t in rng)
                    if lhs != sum(c(i, k, t) * c(t, j, l) for t in rng):
                        return False
                    if lhs != sum(c(j, k, t) * c(i, t, l) for t in rng):
                        return False
    for i in rng:
        for j in rng:
            for k in rng:
                left = sum(c(i, j, t) * form[t - 1][k - 1] for t in rng)
                right = sum(c(j, k, t) * form[i - 1][t - 1] for t in rng)
                if left != right:
                    return False

    def br(a, b, l):
        return c(a, b, l) - c(b, a, l)

    for x in rng:
        for y in rng:
            if y <= x:
                continue
            for z in rng:
                if z <= y:
                    continue
                total = sum(
                    br(a, b, t) * form[t - 1][cc - 1]
                    for a, b, cc in ((x, y, z), (y, z, x), (z, x, y))
                    for t in rng
                )
                if total:
                    return False
    derived = [
        [br(i, j, l) for l in rng] for i in rng for j in rng if i < j
    ]
    derived = [v for v in derived if any(v)]
    for u in derived:
        for v in derived:
            for l in rng:
                total = sum(
                    u[a - 1] * v[b - 1] * br(a, b, l) for a in rng for b in rng
                )
                if total:
                    return False
    return True


def _search_block(args) -> list[tuple]:
    dim, coeff_list, lead, take, form = args
    nslots = dim ** 3
    hits = []
    it = itertools.product(coeff_list, repeat=nslots - 1)
    for rest in itertools.islice(it, take):
        cs = (lead,) + rest
        if _fast_pass(cs, dim, form):
            hits.append(cs)
    return hits


@dataclass
class SearchResult:
    dim: int
    coeffs: tuple[Fraction, ...]
    examined: int
    total: int
    partial: bool
    instances: list[SnlaInstance] = field(default_factory=list)


def snla_search(
    dim: int,
    coeffs: Sequence,
    budget: Optional[int] = None,
    workers: int = 1,
) -> SearchResult:
    """Enumerate all structure-constant tuples over the coefficient set in
    lexicographic order and keep those passing every check with the standard
    form.  The space is partitioned by the leading coefficient, so worker
    count never changes the result list."""
    if dim not in (2, 4):
        raise ValueError("search supports dim 2 or 4 only")
    coeff_list = tuple(sorted({rat(c) for c in coeffs}))
    if not coeff_list:
        raise ValueError("coefficient set is empty")
    if budget is not None and budget < 0:
        raise ValueError("budget must be nonnegative")
    if workers < 1:
        raise ValueError("workers must be >= 1")
    slots = _slot_list(dim)
    nslots = len(slots)
    block = len(coeff_list) ** (nslots - 1)
    total = block * len(coeff_list)
    form = standard_form(dim // 2)

    jobs = []
    for pos, lead in enumerate(coeff_list):
        if budget is None:
            take = block
        else:
            take = max(0, min(budget - pos * block, block))
        if take:
            jobs.append((dim, coeff_list, lead, take, form.matrix))
    examined = sum(job[3] for job in jobs)

    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
            blocks = list(pool.map(_search_block, jobs))
    else:
        blocks = [_search_block(job) for job in jobs]

    instances = []
    for hits in blocks:
        for cs in hits:
            table = ProductTable.from_coeffs(
                dim, dict(zip(slots, cs))
            )
            instances.append(SnlaInstance(dim, table, form))
    return SearchResult(
        dim, coeff_list, examined, total, examined < total, instances
    )


def snla_central_extension(
    s: SnlaInstance, variant: str = "standard", designated: Optional[int] = None
) -> AlgebraInstance:
    """Adjoin a central z.

    standard: [x,y]_ext = [x,y] + omega(x,y) z, the usual symplectic central
    extension (requires the instance to verify).  as_written: experimental
    literal reading of the displayed rule, adding omega(x*y, e_d) z for a
    caller-designated basis element e_d; the interpretation is stamped into
    the result metadata and no identity is assumed to survive.
    """
    if variant == "standard":
        report = verify_snla(s)
        if not report.passed:
            bad = [k for k, v in report.violations.items() if v]
            raise ValueError(f"instance fails verification: {', '.join(bad)}")
        A = s.algebra()
        raw = {}
        for i in range(1, s.dim + 1):
            for j in range(i + 1, s.dim + 1):
                v = s.form.value(i, j)
                if v:
                    raw[(gid(s.product.family, i), gid(s.product.family, j))] = v
        omega = Cochain2(raw=raw)
        ext = central_extension(A, omega, center_family="z")
        ext.metadata["variant"] = "standard"
        return ext
    if variant != "as_written":
        raise ValueError(f"unknown variant {variant!r}")
    if designated is None or not 1 <= designated <= s.dim:
        raise ValueError("as_written variant needs a designated index in 1..dim")
    fam = s.product.family
    z = gid("z", 0)
    bracket = s.bracket_table()
    table = BracketTable(convention="plain")
    for i in range(1, s.dim + 1):
        for j in range(1, s.dim + 1):
            gi, gj = gid(fam, i), gid(fam, j)
            kappa = s.form.pair(
                s.product.value(i, j), Element.of(gid(fam, designated))
            )
            v = bracket.value(gi, gj) + Element.of(z, kappa)
            if v:
                table.assign(gi, gj, v)
    return AlgebraInstance(
        "snla_ext_as_written",
        s.product.generators() + [z],
        table,
        metadata={
            "variant": "as_written",
            "designated": f"{fam}[{designated}]",
            "interpretation": "omega(x*y, e_d) z added to [x,y], both orders stored",
            "status": "experimental",
        },
    )


def snla_from_doc(doc: specfile.AlgebraSpecDoc) -> SnlaInstance:
    """Build an instance from a parsed spec document: product lines give the
    table, form lines the matrix (skew-completed; standard form when absent),
    entry lines an explicit bracket overriding the commutator."""
    if doc.convention != "plain":
        raise ValueError("snla documents must use the plain convention")
    if not doc.generators:
        raise ValueError("snla documents need explicit generator lines")
    fams = {g.family for g in doc.generators}
    if len(fams) != 1:
        raise ValueError("snla documents use a single generator family")
    fam = fams.pop()
    indices = sorted(int(g.index) for g in doc.generators)
    dim = len(indices)
    if indices != list(range(1, dim + 1)):
        raise ValueError("generator indices must be exactly 1..dim")

    entries: dict[tuple[int, int], Element] = {}
    for e in doc.products:
        i, j = int(e.left[1]), int(e.right[1])
        if (i, j) in entries:
            raise ValueError(f"duplicate product entry ({i},{j})")
        entries[(i, j)] = Element(
            {gid(f, ix): c for c, f, ix in e.value}
        )
    product = ProductTable(dim, entries, fam)

    if doc.forms:
        m = [[Fraction(0)] * dim for _ in range(dim)]
        seen = set()
        for fe in doc.forms:
            i, j = int(fe.left[1]), int(fe.right[1])
            for a, b, v in ((i, j, fe.value), (j, i, -fe.value)):
                if (a, b) in seen and m[a - 1][b - 1] != v:
                    raise ValueError(f"conflicting form entries at ({a},{b})")
                seen.add((a, b))
                m[a - 1][b - 1] = v
        form = SymplecticForm(m)
    else:
        if dim % 2:
            raise ValueError("odd dimension admits no symplectic form")
        form = standard_form(dim // 2)

    if doc.entries:
        table = BracketTable(convention="plain")
        for e in doc.entries:
            g = gid(fam, e.left[1])
            h = gid(fam, e.right[1])
            table.assign(g, h, Element({gid(f, ix): c for c, f, ix in e.value}))
        return SnlaInstance(dim, product, form, "explicit", table)
    return SnlaInstance(dim, product, form)


def doc_from_snla(s: SnlaInstance, name: str = "snla") -> specfile.AlgebraSpecDoc:
    """Render an instance as a spec document (products and the form's upper
    triangle; explicit brackets as entry lines)."""
    fam = s.product.family
    families = (specfile.FamilyDecl(fam, "integer", "even"),)
    generators = tuple(
        specfile.GeneratorDecl(fam, Fraction(i)) for i in range(1, s.dim + 1)
    )
    products = []
    for (i, j) in sorted(s.product.entries):
        v = s.product.entries[(i, j)]
        value = tuple(
            (c, g.family, g.index) for g, c in sorted(v.terms.items())
        )
        products.append(
            specfile.ExplicitEntry(
                "product", (fam, Fraction(i)), (fam, Fraction(j)), value
            )
        )
    forms = []
    for i in range(1, s.dim + 1):
        for j in range(i + 1, s.dim + 1):
            v = s.form.value(i, j)
            if v:
                forms.append(
                    specfile.FormEntry((fam, Fraction(i)), (fam, Fraction(j)), v)
                )
    entries = []
    if s.bracket_source == "explicit":
        for (g, h), v in sorted(
            s.explicit_bracket.raw.items(), key=lambda kv: (kv[0][0], kv[0][1])
        ):
            value = tuple(
                (c, t.family, t.index) for t, c in sorted(v.terms.items())
            )
            entries.append(
                specfile.ExplicitEntry(
                    "entry", (g.family, g.index), (h.family, h.index), value
                )
            )
    return specfile.AlgebraSpecDoc(
        name,
        "plain",
        families,
        generators,
        (),
        tuple(entries),
        tuple(products),
        tuple(forms),
        (),
    )
