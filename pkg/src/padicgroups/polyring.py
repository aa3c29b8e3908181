"""Exact polynomial self-maps of affine d-space over Q, Z, or Z/m.

Polynomials are dicts from exponent multi-indices to coefficients; zero
coefficients are never stored, rationals are kept in lowest terms, and two
maps are equal iff their canonical forms coincide.  This is the group
carrier for closure, reduction, and linearization: all identity testing
reduces to syntactic equality of exact coefficients.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable

from .errors import BadInputError

Monomial = tuple[int, ...]


class Ring:
    """Coefficient ring tag: rationals, integers, or integers mod m."""

    __slots__ = ("kind", "modulus")

    def __init__(self, kind: str, modulus: int | None = None):
        if kind not in ("Q", "Z", "Zmod"):
            raise BadInputError(f"unknown ring kind {kind!r}")
        if kind == "Zmod" and (modulus is None or modulus < 2):
            raise BadInputError("modulus must be >= 2")
        self.kind = kind
        self.modulus = modulus if kind == "Zmod" else None

    def normalize(self, c):
        if self.kind == "Q":
            return Fraction(c)
        if self.kind == "Z":
            if isinstance(c, Fraction):
                if c.denominator != 1:
                    raise BadInputError(f"coefficient {c} not an integer")
                return c.numerator
            return int(c)
        if isinstance(c, Fraction):
            if c.denominator % self.modulus == 0:
                raise BadInputError(
                    f"bad prime: denominator of {c} vanishes mod {self.modulus}"
                )
            return c.numerator * pow(c.denominator, -1, self.modulus) % self.modulus
        return int(c) % self.modulus

    def is_zero(self, c) -> bool:
        return c == 0

    def invert(self, c):
        if self.kind == "Q":
            if c == 0:
                raise BadInputError("division by zero")
            return Fraction(1) / c
        if self.kind == "Z":
            if c not in (1, -1):
                raise BadInputError(f"{c} is not a unit in Z")
            return c
        try:
            return pow(c, -1, self.modulus)
        except ValueError:
            raise BadInputError(f"{c} is not a unit mod {self.modulus}") from None

    def __eq__(self, other):
        return (
            isinstance(other, Ring)
            and self.kind == other.kind
            and self.modulus == other.modulus
        )

    def __hash__(self):
        return hash((self.kind, self.modulus))

    def __repr__(self):
        return "Z/%d" % self.modulus if self.kind == "Zmod" else self.kind


RING_Q = Ring("Q")
RING_Z = Ring("Z")


def ring_mod(m: int) -> Ring:
    return Ring("Zmod", m)


# -- raw polynomial dictionaries -------------------------------------------


def poly_clean(poly: dict, ring: Ring) -> dict:
    return {e: c for e, c in ((e, ring.normalize(c)) for e, c in poly.items()) if c != 0}


def poly_add(a: dict, b: dict, ring: Ring) -> dict:
    out = dict(a)
    for e, c in b.items():
        s = ring.normalize(out.get(e, 0) + c)
        if s == 0:
            out.pop(e, None)
        else:
            out[e] = s
    return out


def poly_scale(a: dict, s, ring: Ring) -> dict:
    s = ring.normalize(s)
    if s == 0:
        return {}
    return poly_clean({e: c * s for e, c in a.items()}, ring)


def poly_mul(a: dict, b: dict, ring: Ring, degree_cap: int | None = None,
             keep=None) -> dict:
    out: dict = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            if degree_cap is not None and sum(e) > degree_cap:
                continue
            if keep is not None and not keep(e):
                continue
            out[e] = out.get(e, 0) + ca * cb
    return poly_clean(out, ring)


def poly_pow(a: dict, k: int, nvars: int, ring: Ring, degree_cap: int | None = None,
             keep=None) -> dict:
    result = {(0,) * nvars: ring.normalize(1)}
    for _ in range(k):
        result = poly_mul(result, a, ring, degree_cap, keep)
    return result


def poly_eval(a: dict, point: Iterable, ring: Ring):
    point = list(point)
    total = ring.normalize(0)
    for e, c in a.items():
        term = c
        for x, k in zip(point, e):
            for _ in range(k):
                term = term * x
        total = total + term
    return ring.normalize(total)


def poly_compose(a: dict, maps: list[dict], nvars_out: int, ring: Ring,
                 degree_cap: int | None = None, keep=None) -> dict:
    """Substitute maps[i] for variable i of a; maps live in nvars_out variables."""
    # cache powers of each substituted component
    powers: list[list[dict]] = [[{(0,) * nvars_out: ring.normalize(1)}] for _ in maps]
    out: dict = {}
    for e, c in a.items():
        term = {(0,) * nvars_out: c}
        for i, k in enumerate(e):
            if k == 0:
                continue
            cache = powers[i]
            while len(cache) <= k:
                cache.append(poly_mul(cache[-1], maps[i], ring, degree_cap, keep))
            term = poly_mul(term, cache[k], ring, degree_cap, keep)
        out = poly_add(out, term, ring)
    return out


def poly_derivative(a: dict, var: int, ring: Ring) -> dict:
    out = {}
    for e, c in a.items():
        if e[var] == 0:
            continue
        e2 = e[:var] + (e[var] - 1,) + e[var + 1:]
        out[e2] = out.get(e2, 0) + c * e[var]
    return poly_clean(out, ring)


def _monomial_order(e: Monomial) -> tuple:
    """Graded order, earlier variables first within a degree."""
    return (sum(e), tuple(-x for x in e))


def poly_degree(a: dict) -> int:
    return max((sum(e) for e in a), default=0)


def poly_homogeneous_part(a: dict, degree: int) -> dict:
    return {e: c for e, c in a.items() if sum(e) == degree}


# -- linear algebra over the coefficient ring -------------------------------


def matrix_invert(rows: list[list], ring: Ring) -> list[list]:
    """Gauss-Jordan inverse; over Z the input must be unimodular."""
    n = len(rows)
    work_ring = RING_Q if ring.kind in ("Q", "Z") else ring
    aug = [[work_ring.normalize(rows[i][j]) for j in range(n)]
           + [work_ring.normalize(1 if i == j else 0) for j in range(n)]
           for i in range(n)]
    for col in range(n):
        pivot = next(
            (r for r in range(col, n) if not work_ring.is_zero(aug[r][col])), None
        )
        if pivot is None:
            raise BadInputError("not locally invertible")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv = work_ring.invert(aug[col][col])
        aug[col] = [work_ring.normalize(x * inv) for x in aug[col]]
        for r in range(n):
            if r != col and not work_ring.is_zero(aug[r][col]):
                factor = aug[r][col]
                aug[r] = [
                    work_ring.normalize(x - factor * y)
                    for x, y in zip(aug[r], aug[col])
                ]
    out = [row[n:] for row in aug]
    if ring.kind == "Z":
        for row in out:
            for x in row:
                if Fraction(x).denominator != 1:
                    raise BadInputError("linear part not invertible over Z")
        out = [[int(x) for x in row] for row in out]
    return out


# -- PolyMap -----------------------------------------------------------------


class PolyMap:
    """A polynomial self-map of affine d-space in canonical form."""

    __slots__ = ("d", "ring", "components", "_key")

    def __init__(self, d: int, ring: Ring, components: list[dict]):
        if len(components) != d:
            raise BadInputError(f"expected {d} components, got {len(components)}")
        self.d = d
        self.ring = ring
        self.components = tuple(poly_clean(dict(c), ring) for c in components)
        self._key = tuple(
            tuple(sorted(comp.items(), key=lambda item: _monomial_order(item[0])))
            for comp in self.components
        )

    @classmethod
    def identity(cls, d: int, ring: Ring = RING_Q) -> "PolyMap":
        comps = []
        for i in range(d):
            e = tuple(1 if j == i else 0 for j in range(d))
            comps.append({e: 1})
        return cls(d, ring, comps)

    @classmethod
    def linear(cls, rows: list[list], ring: Ring = RING_Q) -> "PolyMap":
        d = len(rows)
        comps = []
        for i in range(d):
            comp = {}
            for j in range(d):
                if rows[i][j]:
                    e = tuple(1 if k == j else 0 for k in range(d))
                    comp[e] = rows[i][j]
            comps.append(comp)
        return cls(d, ring, comps)

    def degree(self) -> int:
        return max(poly_degree(c) for c in self.components)

    def is_identity(self) -> bool:
        return self == PolyMap.identity(self.d, self.ring)

    def compose(self, other: "PolyMap") -> "PolyMap":
        """self after other (self ∘ other)."""
        if self.d != other.d or self.ring != other.ring:
            raise BadInputError("dimension or ring mismatch in composition")
        comps = [
            poly_compose(c, list(other.components), self.d, self.ring)
            for c in self.components
        ]
        return PolyMap(self.d, self.ring, comps)

    def __call__(self, point):
        return tuple(poly_eval(c, point, self.ring) for c in self.components)

    def constant_term(self):
        zero = (0,) * self.d
        return tuple(c.get(zero, self.ring.normalize(0)) for c in self.components)

    def linear_part(self) -> list[list]:
        rows = []
        for c in self.components:
            row = []
            for j in range(self.d):
                e = tuple(1 if k == j else 0 for k in range(self.d))
                row.append(c.get(e, self.ring.normalize(0)))
            rows.append(row)
        return rows

    def jacobian_at(self, point) -> list[list]:
        return [
            [poly_eval(poly_derivative(c, j, self.ring), point, self.ring)
             for j in range(self.d)]
            for c in self.components
        ]

    def minus_identity(self) -> "PolyMap":
        ident = PolyMap.identity(self.d, self.ring)
        comps = [
            poly_add(c, poly_scale(i, -1, self.ring), self.ring)
            for c, i in zip(self.components, ident.components)
        ]
        return PolyMap(self.d, self.ring, comps)

    def inverse(self, degree_cap: int = 32) -> "PolyMap":
        """Exact polynomial inverse, found by formal reversion.

        Raises if the linear part is singular or no polynomial inverse of
        degree <= degree_cap exists.
        """
        psi = formal_reversion(self, degree_cap)
        if not self.compose(psi).is_identity() or not psi.compose(self).is_identity():
            raise BadInputError(
                f"no polynomial inverse of degree <= {degree_cap} found"
            )
        return psi

    def reduce_mod(self, ell: int) -> "PolyMap":
        """Coefficientwise reduction to Z/ell; names the offending coefficient
        when a denominator dies."""
        if self.ring.kind == "Zmod":
            raise BadInputError("map already lives over a finite ring")
        target = ring_mod(ell)
        comps = []
        for idx, c in enumerate(self.components, start=1):
            reduced = {}
            for e, coeff in c.items():
                frac = Fraction(coeff)
                if frac.denominator % ell == 0:
                    raise BadInputError(
                        f"bad prime: coefficient {coeff} of f{idx} at {e} "
                        f"has denominator divisible by {ell}"
                    )
                reduced[e] = frac
            comps.append(reduced)
        return PolyMap(self.d, target, comps)

    def __eq__(self, other):
        return (
            isinstance(other, PolyMap)
            and self.d == other.d
            and self.ring == other.ring
            and self._key == other._key
        )

    def __hash__(self):
        return hash((self.d, self.ring, self._key))

    def __repr__(self):
        return f"PolyMap(d={self.d}, ring={self.ring}, {serialize_map(self)!r})"


def formal_reversion(pm: PolyMap, degree_cap: int) -> PolyMap:
    """Compositional inverse of pm as a polynomial truncated at degree_cap.

    pm must have an invertible linear part; a constant term is handled by
    conjugating with the matching translation.  The result agrees with the
    true inverse power series through degree_cap.
    """
    const = pm.constant_term()
    ring = pm.ring
    d = pm.d
    zero = (0,) * d
    h_comps = []
    for c in pm.components:
        c = dict(c)
        c.pop(zero, None)
        h_comps.append(c)
    h = PolyMap(d, ring, h_comps)
    linv = matrix_invert(h.linear_part(), ring)
    psi = PolyMap.linear(linv, ring)
    for n in range(2, degree_cap + 1):
        t = [
            poly_compose(c, list(psi.components), d, ring, degree_cap=n)
            for c in h.components
        ]
        correction = [poly_homogeneous_part(t[i], n) for i in range(d)]
        if all(not c for c in correction):
            continue
        new_comps = [dict(c) for c in psi.components]
        for i in range(d):
            fix: dict = {}
            for j in range(d):
                if not ring.is_zero(linv[i][j]):
                    fix = poly_add(
                        fix, poly_scale(correction[j], -linv[i][j], ring), ring
                    )
            new_comps[i] = poly_add(new_comps[i], fix, ring)
        psi = PolyMap(d, ring, new_comps)
    if any(x != 0 for x in const):
        shift = PolyMap(
            d,
            ring,
            [
                poly_add(
                    {tuple(1 if k == i else 0 for k in range(d)): 1},
                    {zero: -const[i]} if const[i] else {},
                    ring,
                )
                for i in range(d)
            ],
        )
        psi = psi.compose(shift)
    return psi


# -- text format --------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+(?:/\d+)?)|(?P<var>x\d+)|(?P<op>[+\-*^]))")


def _parse_polynomial(text: str, d: int, ring: Ring) -> dict:
    pos = 0
    tokens: list[tuple[str, str]] = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            if text[pos:].strip():
                raise BadInputError(f"cannot parse polynomial near {text[pos:]!r}")
            break
        pos = m.end()
        for kind in ("num", "var", "op"):
            if m.group(kind) is not None:
                tokens.append((kind, m.group(kind)))
                break
    poly: dict = {}
    i = 0
    sign = 1
    first = True
    while i < len(tokens):
        kind, val = tokens[i]
        if kind == "op" and val in "+-":
            sign = 1 if val == "+" else -1
            i += 1
        elif not first:
            raise BadInputError(f"expected + or - before term at token {val!r}")
        first = False
        coeff = Fraction(sign)
        exps = [0] * d
        expect_factor = True
        while i < len(tokens):
            kind, val = tokens[i]
            if kind == "op" and val in "+-":
                break
            if kind == "op" and val == "*":
                i += 1
                expect_factor = True
                continue
            if not expect_factor:
                raise BadInputError(f"missing * before {val!r}")
            if kind == "num":
                coeff *= Fraction(val)
                i += 1
            elif kind == "var":
                idx = int(val[1:])
                if not 1 <= idx <= d:
                    raise BadInputError(f"variable {val} out of range for d={d}")
                power = 1
                i += 1
                if i + 1 < len(tokens) and tokens[i] == ("op", "^"):
                    if tokens[i + 1][0] != "num" or "/" in tokens[i + 1][1]:
                        raise BadInputError("exponent must be a plain integer")
                    power = int(tokens[i + 1][1])
                    i += 2
                exps[idx - 1] += power
            else:
                raise BadInputError(f"unexpected token {val!r}")
            expect_factor = False
        e = tuple(exps)
        poly[e] = poly.get(e, Fraction(0)) + coeff
        sign = 1
    return poly_clean(poly, ring)


def parse_map(text: str) -> PolyMap:
    """Parse the on-disk map format:

        d=<int>; ring=Q|Z|Z/<m>
        f1 = <polynomial in x1..xd>
        ...
    """
    lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
    if not lines:
        raise BadInputError("empty map text")
    header = lines[0].replace(" ", "")
    m = re.fullmatch(r"d=(\d+);ring=(Q|Z|Z/(\d+))", header)
    if not m:
        raise BadInputError(f"bad header {lines[0]!r}")
    d = int(m.group(1))
    if m.group(3):
        ring = ring_mod(int(m.group(3)))
    elif m.group(2) == "Z":
        ring = RING_Z
    else:
        ring = RING_Q
    comps: dict[int, dict] = {}
    for line in lines[1:]:
        lm = re.match(r"f(\d+)\s*=\s*(.*)", line)
        if not lm:
            raise BadInputError(f"bad coordinate line {line!r}")
        idx = int(lm.group(1))
        if not 1 <= idx <= d or idx in comps:
            raise BadInputError(f"bad or duplicate coordinate f{idx}")
        comps[idx] = _parse_polynomial(lm.group(2), d, ring)
    if set(comps) != set(range(1, d + 1)):
        raise BadInputError("missing coordinate definitions")
    return PolyMap(d, ring, [comps[i] for i in range(1, d + 1)])


def _format_coefficient(c) -> str:
    if isinstance(c, Fraction) and c.denominator != 1:
        return f"{c.numerator}/{c.denominator}"
    return str(int(c))


def _serialize_polynomial(poly: dict) -> str:
    if not poly:
        return "0"
    parts = []
    for e, c in sorted(poly.items(), key=lambda item: _monomial_order(item[0])):
        factors = []
        for i, k in enumerate(e, start=1):
            if k == 1:
                factors.append(f"x{i}")
            elif k > 1:
                factors.append(f"x{i}^{k}")
        mag = abs(c)
        neg = c < 0
        if not factors or mag != 1:
            factors.insert(0, _format_coefficient(mag))
        term = "*".join(factors)
        if not parts:
            parts.append(f"-{term}" if neg else term)
        else:
            parts.append(f"- {term}" if neg else f"+ {term}")
    return " ".join(parts)


def serialize_map(pm: PolyMap) -> str:
    ring = {"Q": "Q", "Z": "Z"}.get(pm.ring.kind, f"Z/{pm.ring.modulus}")
    lines = [f"d={pm.d}; ring={ring}"]
    for i, comp in enumerate(pm.components, start=1):
        lines.append(f"f{i} = {_serialize_polynomial(comp)}")
    return "\n".join(lines) + "\n"
