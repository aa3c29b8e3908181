"""Truncated Tate-series arithmetic: Gauss norms, composition, inversion,
congruence levels, and zero counting over the p-adic integers.

Every series here represents its class modulo the window (p^N, total degree
> D).  Operations document their correctness against that window; callers
that know their input is an exact polynomial (no tail, exact coefficients)
assert it where an operation needs true-series facts.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .errors import BadInputError, CertificateError, PrecisionError
from .padic import PadicInt, PrecisionPolicy, flow_threshold, vp, vp_fraction
from .polyring import (
    PolyMap,
    Ring,
    formal_reversion,
    poly_add,
    poly_clean,
    poly_compose,
    poly_derivative,
    poly_scale,
    ring_mod,
)

INFINITY = math.inf


def _residue_valuation(r: int, p: int, N: int) -> int:
    return N if r == 0 else vp(r, p)


class TateSeries:
    """One coordinate function: a truncated power series with residue
    coefficients modulo p^N and total degree <= degree_cap.

    `shift` >= 0 marks a series that stands for p^(-shift) times the stored
    integral data; only norm bookkeeping and evaluation accept nonzero
    shifts, every structural operation demands integral series.
    """

    __slots__ = ("p", "N", "nvars", "degree_cap", "coeffs", "shift", "_ring")

    def __init__(self, p: int, N: int, nvars: int, degree_cap: int,
                 coeffs: dict, shift: int = 0):
        if N < 1:
            raise PrecisionError("precision exhausted")
        if shift < 0:
            raise BadInputError("shift must be nonnegative")
        self.p = p
        self.N = N
        self.nvars = nvars
        self.degree_cap = degree_cap
        self.shift = shift
        self._ring = ring_mod(p**N)
        cleaned = {}
        for e, c in coeffs.items():
            if len(e) != nvars:
                raise BadInputError(f"monomial {e} has wrong arity")
            if sum(e) > degree_cap:
                continue
            cleaned[e] = c
        self.coeffs = poly_clean(cleaned, self._ring)

    # -- constructors ---------------------------------------------------------

    @classmethod
    def from_rational(cls, p: int, N: int, nvars: int, degree_cap: int,
                      coeffs: dict) -> "TateSeries":
        """Embed exact rational coefficients; p in a denominator raises."""
        out = {}
        for e, c in coeffs.items():
            c = Fraction(c)
            if c.denominator % p == 0:
                raise BadInputError(
                    f"coefficient {c} is not p-integral; use an explicit shift"
                )
            out[e] = c
        return cls(p, N, nvars, degree_cap, out)

    @classmethod
    def zero(cls, p: int, N: int, nvars: int, degree_cap: int) -> "TateSeries":
        return cls(p, N, nvars, degree_cap, {})

    @classmethod
    def coordinate(cls, p: int, N: int, nvars: int, degree_cap: int,
                   index: int) -> "TateSeries":
        e = tuple(1 if j == index else 0 for j in range(nvars))
        return cls(p, N, nvars, degree_cap, {e: 1})

    # -- bookkeeping ----------------------------------------------------------

    def _require_compatible(self, other: "TateSeries"):
        if (self.p, self.nvars, self.degree_cap) != (
            other.p,
            other.nvars,
            other.degree_cap,
        ):
            raise BadInputError("incompatible series contexts (prime or caps)")
        if self.shift != other.shift:
            raise BadInputError("mixing series with different scale shifts")

    def gauss_norm_exponent(self):
        """e with norm = p^(-e); +inf for the zero window."""
        if not self.coeffs:
            return INFINITY
        return min(
            _residue_valuation(c, self.p, self.N) for c in self.coeffs.values()
        ) - self.shift

    def is_integral(self) -> bool:
        return self.shift == 0

    def coefficient(self, e: tuple) -> PadicInt:
        return PadicInt(self.p, self.N, self.coeffs.get(e, 0))

    def valuations(self) -> dict:
        return {
            e: _residue_valuation(c, self.p, self.N) for e, c in self.coeffs.items()
        }

    # -- arithmetic ------------------------------------------------------------

    def add(self, other: "TateSeries") -> "TateSeries":
        self._require_compatible(other)
        N = min(self.N, other.N)
        out = poly_add(self.coeffs, other.coeffs, ring_mod(self.p**N))
        return TateSeries(self.p, N, self.nvars, self.degree_cap, out, self.shift)

    def negate(self) -> "TateSeries":
        out = poly_scale(self.coeffs, -1, self._ring)
        return TateSeries(self.p, self.N, self.nvars, self.degree_cap, out, self.shift)

    def subtract(self, other: "TateSeries") -> "TateSeries":
        return self.add(other.negate())

    def scale(self, s) -> "TateSeries":
        if isinstance(s, PadicInt):
            s = s.lift()
        out = poly_scale(self.coeffs, s, self._ring)
        return TateSeries(self.p, self.N, self.nvars, self.degree_cap, out, self.shift)

    def multiply(self, other: "TateSeries") -> "TateSeries":
        self._require_compatible(other)
        N = min(self.N, other.N)
        ring = ring_mod(self.p**N)
        from .polyring import poly_mul

        out = poly_mul(self.coeffs, other.coeffs, ring, degree_cap=self.degree_cap)
        return TateSeries(
            self.p, N, self.nvars, self.degree_cap, out, self.shift + other.shift
        )

    def derivative(self, var: int) -> "TateSeries":
        out = poly_derivative(self.coeffs, var, self._ring)
        return TateSeries(self.p, self.N, self.nvars, self.degree_cap, out, self.shift)

    def evaluate(self, point) -> PadicInt:
        vals = [x if isinstance(x, PadicInt) else PadicInt(self.p, self.N, x)
                for x in point]
        total = PadicInt(self.p, self.N, 0)
        for e, c in self.coeffs.items():
            term = PadicInt(self.p, self.N, c)
            for x, k in zip(vals, e):
                if k:
                    term = term * x**k
            total = total + term
        if self.shift:
            total = total.divide_by_p_power(self.shift)
        return total

    def compose_map(self, f: "TateMap") -> "TateSeries":
        """Substitute the components of f; requires f integral (in the unit
        polydisk algebra) so the result stays in the window."""
        if f.d != self.nvars:
            raise BadInputError("dimension mismatch in composition")
        if not f.is_integral():
            raise BadInputError("composition outside the integral Tate algebra")
        if (self.p, self.degree_cap) != (f.p, f.degree_cap):
            raise BadInputError("incompatible series contexts (prime or caps)")
        N = min(self.N, f.N)
        ring = ring_mod(self.p**N)
        out = poly_compose(
            self.coeffs,
            [c.coeffs for c in f.components],
            self.nvars,
            ring,
            degree_cap=self.degree_cap,
        )
        return TateSeries(self.p, N, self.nvars, self.degree_cap, out, self.shift)

    def __eq__(self, other):
        if not isinstance(other, TateSeries):
            return NotImplemented
        self._require_compatible(other)
        N = min(self.N, other.N)
        mod = self.p**N
        keys = set(self.coeffs) | set(other.coeffs)
        return all(
            (self.coeffs.get(e, 0) - other.coeffs.get(e, 0)) % mod == 0 for e in keys
        )

    def __repr__(self):
        return (
            f"TateSeries(p={self.p}, N={self.N}, D={self.degree_cap}, "
            f"{len(self.coeffs)} terms)"
        )


class TateMap:
    """A d-tuple of Tate series viewed as a self-map of the unit polydisk.

    The congruence level c (norm of f - id as p^-c) is recomputed on demand,
    never cached from construction data.
    """

    __slots__ = ("components", "verified_inverse")

    def __init__(self, components, verified_inverse=None):
        components = tuple(components)
        if not components:
            raise BadInputError("empty map")
        first = components[0]
        for c in components:
            if (c.p, c.N, c.nvars, c.degree_cap, c.shift) != (
                first.p,
                first.N,
                first.nvars,
                first.degree_cap,
                first.shift,
            ):
                raise BadInputError("components must share one series context")
        if first.nvars != len(components):
            raise BadInputError("a self-map needs as many components as variables")
        self.components = components
        self.verified_inverse = verified_inverse

    @property
    def p(self):
        return self.components[0].p

    @property
    def N(self):
        return self.components[0].N

    @property
    def d(self):
        return len(self.components)

    @property
    def degree_cap(self):
        return self.components[0].degree_cap

    def is_integral(self) -> bool:
        return all(c.is_integral() for c in self.components)

    @classmethod
    def identity(cls, p: int, N: int, d: int, degree_cap: int) -> "TateMap":
        return cls(
            [TateSeries.coordinate(p, N, d, degree_cap, i) for i in range(d)]
        )

    @classmethod
    def from_polymap(cls, pm: PolyMap, p: int, N: int, degree_cap: int) -> "TateMap":
        comps = [
            TateSeries.from_rational(p, N, pm.d, degree_cap, dict(c))
            for c in pm.components
        ]
        return cls(comps)

    def gauss_norm_exponent(self):
        return min(c.gauss_norm_exponent() for c in self.components)

    def minus_identity(self) -> list[TateSeries]:
        ident = TateMap.identity(self.p, self.N, self.d, self.degree_cap)
        return [a.subtract(b) for a, b in zip(self.components, ident.components)]

    def congruence_level(self):
        """c = -log_p ||f - id||; +inf when f is the identity window."""
        return min(u.gauss_norm_exponent() for u in self.minus_identity())

    def compose(self, other: "TateMap") -> "TateMap":
        """self after other."""
        return TateMap([c.compose_map(other) for c in self.components])

    def evaluate(self, point):
        return tuple(c.evaluate(point) for c in self.components)

    def power(self, k: int) -> "TateMap":
        if k < 0:
            raise BadInputError("negative powers need invert_diffeo first")
        result = TateMap.identity(self.p, self.N, self.d, self.degree_cap)
        base = self
        while k:
            if k & 1:
                result = result.compose(base)
            base = base.compose(base)
            k >>= 1
        return result

    def __eq__(self, other):
        if not isinstance(other, TateMap):
            return NotImplemented
        return all(a == b for a, b in zip(self.components, other.components))

    def __repr__(self):
        return f"TateMap(d={self.d}, p={self.p}, N={self.N}, D={self.degree_cap})"


def gauss_norm(f: TateSeries | TateMap):
    """Exponent e with ||f|| = p^(-e) measured on the stored window."""
    return f.gauss_norm_exponent()


def distance_exponent(xs, ys, p: int, N: int) -> int:
    """||x - y|| = p^(-e) on Z_p^d points given as residues."""
    best = N
    for a, b in zip(xs, ys):
        ra = a.lift() if isinstance(a, PadicInt) else a % p**N
        rb = b.lift() if isinstance(b, PadicInt) else b % p**N
        best = min(best, _residue_valuation((ra - rb) % p**N, p, N))
    return best


def compose(g: TateSeries | TateMap, f: TateMap):
    """g after f, correct against the shared window; ||g∘f|| <= ||g||."""
    if isinstance(g, TateMap):
        return g.compose(f)
    return g.compose_map(f)


class InversionReport:
    """Result of local inversion: the truncated inverse, the rescaling
    exponent for the polydisk on which both directions are integral, and the
    per-degree norm-bound audit."""

    def __init__(self, inverse_polymap, inverse_tatemap, rescale_exponent,
                 norm_bound_ok, degree_norms):
        self.inverse_polymap = inverse_polymap
        self.inverse_tatemap = inverse_tatemap
        self.rescale_exponent = rescale_exponent
        self.norm_bound_ok = norm_bound_ok
        self.degree_norms = degree_norms


def invert_local(phi: PolyMap, p: int, N: int, degree_cap: int) -> InversionReport:
    """Formal inverse of phi at the origin (phi(0) = 0, invertible linear
    part), with the norm audit ||Psi_n|| <= max(1, ||L^{-1}||^n).

    The rescale exponent k is the least k >= 0 making every nonlinear
    homogeneous part of both (1/p^k)phi(p^k x) and its inverse p-integral;
    integral linear parts are required for the rescaled pair to be honest
    unit-polydisk maps, and reported via the inverse_tatemap field (None
    when the linear part is not a p-adic unit matrix).
    """
    if phi.ring.kind not in ("Q", "Z"):
        raise BadInputError("local inversion expects exact coefficients over Q or Z")
    if any(c != 0 for c in phi.constant_term()):
        raise BadInputError("inversion point must be a fixed origin: phi(0) != 0")
    psi = formal_reversion(phi, degree_cap)

    linv_rows = psi.linear_part()
    linv_exponent = min(
        (vp_fraction(Fraction(x), p) for row in linv_rows for x in row if x != 0),
        default=0,
    )
    # ||L^{-1}|| = p^(-linv_exponent); the audit bound for degree n is
    # max(0-exponent, n*linv_exponent) on the exponent scale.
    degree_norms = {}
    norm_bound_ok = True
    max_rescale = 0
    for source in (phi, psi):
        for comp in source.components:
            for e, c in comp.items():
                n = sum(e)
                v = vp_fraction(Fraction(c), p)
                if source is psi:
                    degree_norms.setdefault(n, INFINITY)
                    degree_norms[n] = min(degree_norms[n], v)
                if n >= 2 and v < 0:
                    max_rescale = max(max_rescale, math.ceil(-v / (n - 1)))
    for n, v in degree_norms.items():
        if v < min(0, n * linv_exponent):
            norm_bound_ok = False
    k = max_rescale
    # rescaled inverse as an honest integral map when representable
    inverse_tatemap = None
    unit_linear = linv_exponent == 0 and all(
        vp_fraction(Fraction(x), p) >= 0
        for row in linv_rows
        for x in row
        if x != 0
    )
    if unit_linear:
        representable = True
        comps = []
        for comp in psi.components:
            out = {}
            for e, c in comp.items():
                n = sum(e)
                c = Fraction(c) * Fraction(p) ** (k * (n - 1))
                if c.denominator % p == 0:
                    representable = False
                out[e] = c
            comps.append(out)
        if representable:
            inverse_tatemap = TateMap(
                [
                    TateSeries.from_rational(p, N, phi.d, degree_cap, comp)
                    for comp in comps
                ]
            )
    return InversionReport(psi, inverse_tatemap, k, norm_bound_ok, degree_norms)


def invert_diffeo(f: TateMap, policy: PrecisionPolicy | None = None) -> TateMap:
    """Inverse of a small perturbation of the identity by fixed-point
    iteration g <- id - (f - id)∘g; contraction factor p^(-c).

    Requires congruence level c >= flow_threshold(p).  The returned map
    carries f as its verified inverse witness.
    """
    p, N, d, cap = f.p, f.N, f.d, f.degree_cap
    c = f.congruence_level()
    if c < flow_threshold(p):
        raise BadInputError("below Bell-Poonen threshold")
    ident = TateMap.identity(p, N, d, cap)
    u = f.minus_identity()
    g = ident
    for _ in range(N + 2):
        composed = [ui.compose_map(g) for ui in u]
        g_new = TateMap([a.subtract(b) for a, b in zip(ident.components, composed)])
        if g_new == g:
            break
        g = g_new
    else:
        raise PrecisionError("inverse iteration failed to stabilize")
    fg = f.compose(g)
    if not fg == ident:
        raise CertificateError("f∘g does not reproduce the identity window")
    gf_defect = min(
        s.gauss_norm_exponent() for s in g.compose(f).minus_identity()
    )
    # g∘f picks up window fuzz only through tails of degree > cap spreading
    # down via constant terms, each pick worth another c digits; maps fixing
    # the origin therefore verify exactly, others to the 2c tolerance
    has_constant = any(
        comp.coeffs.get((0,) * d, 0) != 0 for comp in f.components
    )
    tolerance = min(N, 2 * c) if has_constant else N
    if gf_defect < tolerance:
        raise CertificateError("g∘f defect above the window tolerance")
    inverse = TateMap(g.components, verified_inverse=f)
    return inverse


def congruence_power_levels(f: TateMap, policy: PrecisionPolicy) -> list:
    """Measured congruence levels of f^(p^c) for c = 1..N-guard.

    Requires f ≡ id mod p; each level must come out >= c, otherwise the
    iterated-power congruence has been violated and we fail loudly.
    """
    p = f.p
    if f.congruence_level() < 1:
        raise BadInputError("map is not congruent to the identity mod p")
    levels = []
    g = f
    for c in range(1, policy.zero_threshold + 1):
        g = g.power(p)
        level = g.congruence_level()
        levels.append(level)
        if level < c:
            raise CertificateError(
                f"power p^{c} has congruence level {level} < {c}"
            )
    return levels


def strassman_bound(f: TateSeries, exact: bool = False) -> int:
    """Largest index attaining the maximal coefficient norm: an upper bound
    for the number of zeros in Z_p.

    The caller must assert exactness: residues are exact values and the
    window holds the whole series.
    """
    if f.nvars != 1:
        raise BadInputError("Strassman bound is for one-variable series")
    if not exact:
        raise BadInputError(
            "Strassman needs an exactness assertion for the stored window"
        )
    if not f.coeffs:
        raise BadInputError("zero function")
    vals = {e[0]: _residue_valuation(c, f.p, f.N) for e, c in f.coeffs.items()}
    best = min(vals.values())
    return max(i for i, v in vals.items() if v == best)


# -- Hensel-style zero counting (the independent search route) ---------------


def _poly_eval_int(coeffs: list[int], x: int) -> int:
    acc = 0
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def _poly_derivative_int(coeffs: list[int]) -> list[int]:
    return [i * c for i, c in enumerate(coeffs)][1:]


def _squarefree_part(coeffs: list[int]) -> list[int]:
    """Primitive squarefree part of an integer polynomial (ascending coeffs)."""
    import sympy

    x = sympy.Symbol("x")
    poly = sympy.Poly(list(reversed(coeffs)), x)
    part = poly.sqf_part()
    out = [int(c) for c in reversed(part.all_coeffs())]
    return out


def count_zp_roots(coeffs: list[int], p: int, max_depth: int = 24) -> int:
    """Number of distinct roots of an integer polynomial in Z_p, found by
    branching on residues and lifting simple roots.

    Independent of strassman_bound: pure residue search with the depth
    bounded by the valuation of the discriminant of the squarefree part.
    """
    coeffs = list(coeffs)
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    if not coeffs:
        raise BadInputError("zero polynomial")
    g = _squarefree_part(coeffs)

    def strip_p(cs):
        k = min(vp(c, p) for c in cs if c != 0)
        return [c // p**k for c in cs]

    def count(cs, depth):
        if depth < 0:
            raise PrecisionError("root search exceeded its depth budget")
        cs = strip_p(cs)
        deriv = _poly_derivative_int(cs)
        total = 0
        for r in range(p):
            if _poly_eval_int(cs, r) % p:
                continue
            if deriv and _poly_eval_int(deriv, r) % p:
                total += 1
                continue
            # branch: substitute x = r + p*w
            shifted = _shift_scale(cs, r, p)
            total += count(shifted, depth - 1)
        return total

    return count(g, max_depth)


def _shift_scale(coeffs: list[int], r: int, p: int) -> list[int]:
    """Coefficients of f(r + p*w) as a polynomial in w, by direct expansion."""
    out = [0] * len(coeffs)
    base = [1]  # (r + p*w)^i, ascending in w
    for c in coeffs:
        for j, b in enumerate(base):
            out[j] += c * b
        nxt = [0] * (len(base) + 1)
        for j, b in enumerate(base):
            nxt[j] += b * r
            nxt[j + 1] += b * p
        base = nxt
    return out
