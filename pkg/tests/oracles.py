"""Independent brute-force oracles used to cross-check the library.

These deliberately reimplement the checks with naive nested loops and no
shared helper code, so a bug in the library's iteration or sign handling
cannot cancel against itself in the tests.
"""

from __future__ import annotations

from fractions import Fraction

from lieforge.algebra import AlgebraInstance, Element, GeneratorId


def _pair_value(A: AlgebraInstance, g: GeneratorId, h: GeneratorId):
    v = A.table.raw.get((g, h))
    if v is not None:
        return dict(v.terms)
    w = A.table.raw.get((h, g))
    if w is None:
        return {}
    sign = A.table.swap_sign(h, g)
    return {t: sign * c for t, c in w.terms.items()}


def naive_jacobi_failures(A: AlgebraInstance) -> list[tuple]:
    """All generator triples (by index, i<=j<=k for super, i<j<k plain)
    where the cyclic (graded) Jacobi sum is nonzero.  No window handling:
    intended for windowless instances only."""
    gens = A.generators
    n = len(gens)
    sup = A.table.convention == "super"
    par = A.table.family_parity
    failures = []
    for i in range(n):
        for j in range(i if sup else i + 1, n):
            for k in range(j if sup else j + 1, n):
                x, y, z = gens[i], gens[j], gens[k]
                total: dict[GeneratorId, Fraction] = {}
                for a, b, c in ((x, y, z), (y, z, x), (z, x, y)):
                    sign = 1
                    if sup and par(a.family) and par(c.family):
                        sign = -1
                    inner = _pair_value(A, b, c)
                    for t, ct in inner.items():
                        outer = _pair_value(A, a, t)
                        for u, cu in outer.items():
                            total[u] = total.get(u, Fraction(0)) + sign * ct * cu
                if any(v != 0 for v in total.values()):
                    failures.append((x, y, z))
    return failures


def naive_is_derivation(A: AlgebraInstance, images: dict) -> bool:
    """Check D[g,h] = [Dg,h] + [g,Dh] on every assigned pair by expansion.
    ``images`` maps generator to Element."""
    for (g, h), v in A.table.raw.items():
        left: dict[GeneratorId, Fraction] = {}
        for t, c in v.terms.items():
            for u, cu in images.get(t, Element.zero()).terms.items():
                left[u] = left.get(u, Fraction(0)) + c * cu
        right: dict[GeneratorId, Fraction] = {}
        for t, c in images.get(g, Element.zero()).terms.items():
            for u, cu in _pair_value(A, t, h).items():
                right[u] = right.get(u, Fraction(0)) + c * cu
        for t, c in images.get(h, Element.zero()).terms.items():
            for u, cu in _pair_value(A, g, t).items():
                right[u] = right.get(u, Fraction(0)) + c * cu
        diff = set(left) | set(right)
        for u in diff:
            if left.get(u, Fraction(0)) != right.get(u, Fraction(0)):
                return False
    return True


def naive_cocycle_residual(A: AlgebraInstance, omega) -> bool:
    """True iff the cyclic cocycle sum vanishes on all generator triples.
    ``omega(g, h)`` returns a Fraction; super signs follow the table."""
    gens = A.generators
    n = len(gens)
    sup = A.table.convention == "super"
    par = A.table.family_parity
    for i in range(n):
        for j in range(i if sup else i + 1, n):
            for k in range(j if sup else j + 1, n):
                x, y, z = gens[i], gens[j], gens[k]
                total = Fraction(0)
                for a, b, c in ((x, y, z), (y, z, x), (z, x, y)):
                    sign = 1
                    if sup and par(a.family) and par(c.family):
                        sign = -1
                    for t, ct in _pair_value(A, a, b).items():
                        total += sign * ct * omega(t, c)
                if total:
                    return False
    return True


def naive_right_commutative(dim: int, coeff: dict) -> bool:
    """(e_i e_j) e_k == (e_i e_k) e_j via raw structure constants;
    coeff maps (i,j,k) to the coefficient of e_k in e_i e_j."""
    c = lambda i, j, k: coeff.get((i, j, k), Fraction(0))
    r = range(1, dim + 1)
    for i in r:
        for j in r:
            for k in r:
                for l in r:
                    lhs = sum(c(i, j, t) * c(t, k, l) for t in r)
                    rhs = sum(c(i, k, t) * c(t, j, l) for t in r)
                    if lhs != rhs:
                        return False
    return True


def naive_associative(dim: int, coeff: dict) -> bool:
    c = lambda i, j, k: coeff.get((i, j, k), Fraction(0))
    r = range(1, dim + 1)
    for i in r:
        for j in r:
            for k in r:
                for l in r:
                    lhs = sum(c(i, j, t) * c(t, k, l) for t in r)
                    rhs = sum(c(j, k, t) * c(i, t, l) for t in r)
                    if lhs != rhs:
                        return False
    return True


def naive_form_compat(dim: int, coeff: dict, matrix) -> bool:
    """omega(e_i e_j, e_k) == omega(e_i, e_j e_k) via raw constants."""
    c = lambda i, j, k: coeff.get((i, j, k), Fraction(0))
    r = range(1, dim + 1)
    for i in r:
        for j in r:
            for k in r:
                left = sum(c(i, j, t) * matrix[t - 1][k - 1] for t in r)
                right = sum(c(j, k, t) * matrix[i - 1][t - 1] for t in r)
                if left != right:
                    return False
    return True


def esvla_w3_cyclic(p, m, r) -> Fraction:
    """Cyclic cocycle sum for the M-Y delta cochain on (L_p, M_m, Y_r).

    Expanded by hand from the displayed formulas: with b = r - 1/2,
    only omega3([L_p,M_m], Y_r) and omega3([Y_r,L_p], M_m) can hit the
    M-Y support, both under the same delta p+m+b+1 = 0, giving
    (m + p/2 - b) on the delta and 0 off it.
    """
    b = Fraction(r) - Fraction(1, 2)
    if p + m + b + 1 != 0:
        return Fraction(0)
    return m + Fraction(p, 2) - b
