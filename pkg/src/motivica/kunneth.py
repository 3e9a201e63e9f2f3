"""
Künneth formula on graded groups, with an explicit splitting.

Degree n of A (x) B is the sum over p + q = n of A^p (x) B^q plus the sum
over p + q = n + 1 of Tor(A^p, B^q). Both are computed on pairs of
canonical cyclic generators: Z/a (x) Z/b = Z/gcd(a, b) with 0 meaning Z,
and Tor(Z/a, Z/b) = Z/gcd(a, b) when a, b > 0, realized as the subgroup
Z/b[a] generated by b / gcd(a, b).
"""

from dataclasses import dataclass
from functools import lru_cache
from math import gcd

from motivica.abelian import AbMorphism, FinAbGroup, normalize_cyclic
from motivica.complexes import (
    AbComplex,
    Bicomplex,
    GradedGroup,
    GradedMorphism,
    total,
)
from motivica.linalg import IntMatrix

TENSOR = 0
TOR = 1


@dataclass(frozen=True)
class Summand:
    kind: int
    p: int
    q: int
    s: int
    t: int
    order: int


@dataclass(frozen=True)
class KunnethDegree:
    summands: tuple[Summand, ...]
    group: FinAbGroup
    to_canonical: IntMatrix
    from_canonical: IntMatrix


@lru_cache(maxsize=4096)
def _layout(a: GradedGroup, b: GradedGroup, n: int) -> KunnethDegree:
    summands: list[Summand] = []
    for p, group_a in a.groups:
        q = n - p
        group_b = b.at(q)
        for s, oa in enumerate(group_a.orders):
            for t, ob in enumerate(group_b.orders):
                if (order := gcd(oa, ob)) != 1:
                    summands.append(Summand(TENSOR, p, q, s, t, order))
    for p, group_a in a.groups:
        q = n + 1 - p
        group_b = b.at(q)
        for s, oa in enumerate(group_a.orders):
            for t, ob in enumerate(group_b.orders):
                if oa and ob and (order := gcd(oa, ob)) > 1:
                    summands.append(Summand(TOR, p, q, s, t, order))
    group, to_canonical, from_canonical = normalize_cyclic([x.order for x in summands])
    return KunnethDegree(tuple(summands), group, to_canonical, from_canonical)


def _degrees(a: GradedGroup, b: GradedGroup) -> list[int]:
    degrees = set()
    for p in a.degrees():
        for q in b.degrees():
            degrees.update((p + q, p + q - 1))
    return sorted(degrees)


@lru_cache(maxsize=1024)
def kunneth(a: GradedGroup, b: GradedGroup) -> GradedGroup:
    return GradedGroup(tuple((n, _layout(a, b, n).group) for n in _degrees(a, b)))


def _tor_coefficient(m: int, n: int, oa: int, ob: int, dst_a: int, dst_b: int) -> int:
    """Coefficient of the Tor generator induced by a -> m a', b -> n b'"""
    g, g_prime = gcd(oa, ob), gcd(dst_a, dst_b)
    lifted = (m * oa) // dst_a
    image = (lifted * n * (ob // g)) % dst_b
    return image // (dst_b // g_prime)


def kunneth_map(f: GradedMorphism, g: GradedMorphism) -> GradedMorphism:
    """Map induced by f and g on the chosen Künneth splittings"""
    source = kunneth(f.source, g.source)
    target = kunneth(f.target, g.target)
    maps = []
    for n in source.degrees():
        if target.at(n).is_zero():
            continue
        src = _layout(f.source, g.source, n)
        dst = _layout(f.target, g.target, n)
        index: dict[tuple[int, int, int], list[tuple[int, Summand]]] = {}
        for k, x in enumerate(dst.summands):
            index.setdefault((x.kind, x.p, x.q), []).append((k, x))
        raw = [[0] * len(src.summands) for _ in range(len(dst.summands))]
        for col, x in enumerate(src.summands):
            fa, gb = f.at(x.p).matrix, g.at(x.q).matrix
            oa = f.source.at(x.p).orders[x.s]
            ob = g.source.at(x.q).orders[x.t]
            for row, y in index.get((x.kind, x.p, x.q), []):
                m, k = fa[y.s, x.s], gb[y.t, x.t]
                if not m or not k:
                    continue
                if x.kind == TENSOR:
                    raw[row][col] = m * k
                else:
                    dst_a = f.target.at(y.p).orders[y.s]
                    dst_b = g.target.at(y.q).orders[y.t]
                    raw[row][col] = _tor_coefficient(m, k, oa, ob, dst_a, dst_b)
        matrix = IntMatrix.from_rows(raw, len(src.summands))
        maps.append(
            (
                n,
                AbMorphism(
                    source.at(n),
                    target.at(n),
                    dst.to_canonical @ matrix @ src.from_canonical,
                ),
            )
        )
    return GradedMorphism(source, target, tuple(maps))


def tensor_complex(c: AbComplex, d: AbComplex) -> AbComplex:
    """Total complex of the column-wise Künneth products, Koszul signed"""
    terms: dict[tuple[int, int], GradedGroup] = {}
    d_h: dict[tuple[int, int], GradedMorphism] = {}
    d_v: dict[tuple[int, int], GradedMorphism] = {}
    for i in range(c.start, c.end + 1):
        for j in range(d.start, d.end + 1):
            terms[(i, j)] = kunneth(c.term(i), d.term(j))
            identity_c = GradedMorphism.identity(c.term(i))
            identity_d = GradedMorphism.identity(d.term(j))
            if i < c.end:
                d_h[(i, j)] = kunneth_map(c.d(i), identity_d)
            if j < d.end:
                d_v[(i, j)] = kunneth_map(identity_c, d.d(j))
    return total(Bicomplex(terms, d_h, d_v))


def coefficient_complex(modulus: int) -> AbComplex:
    """One column complex Z/m in degree 0, tensoring with it changes coefficients"""
    return AbComplex.single(GradedGroup.of({0: FinAbGroup.cyclic(modulus)}))


def with_coefficients(c: AbComplex, modulus: int) -> AbComplex:
    return tensor_complex(c, coefficient_complex(modulus))

