"""Table-driven small quantum homology with Novikov coefficients.

A manifold model packages an even-degree homology basis, the intersection
pairing, and a finite table of three-point genus-zero invariants n(a,b,c;B).
The B = 0 stratum of the table encodes triple intersections, so one contraction
rule produces both products: with g the inverse pairing matrix,

    a_i * a_j = sum_{B,k,l} n(a_i, a_j, a_k; B) g^{kl} a_l (x) e^{-B},

and the classical cap product keeps only the B = 0 stratum.  Elements of the
module are finite sums a (x) e^B with rational exponents, multiplied termwise
through the rule above.

Inversion runs through Cramer's rule over the exponent group ring.  The
multiplication-by-x matrix M_x has a group-ring determinant; x is invertible
in the area-completed ring exactly when det M_x has a unique term of maximal
area (the associated graded ring is a domain whose units are monomials).  The
leading monomial is peeled off and the remainder expanded as a geometric
series, truncated at a caller-chosen valuation floor; when the series is
finite the result is the exact inverse.

Built-in models: complex projective space of any dimension, and the one-point
blow-up of the projective plane with a size-a exceptional divisor.
"""

from __future__ import annotations

import json
import math
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Optional, Sequence, Union

from .novikov import (
    ChernFunctional,
    NovikovElement,
    OmegaFunctional,
    ParseError,
    RationalLike,
    SphereClass,
    _frac,
    _parse_exp_factor,
    _parse_rational,
    _signed_chunks,
    _split_factors,
    format_exponent,
    nov_mul,
    truncate_below,
    valuation,
)


class NotInvertibleError(ValueError):
    """Raised when an element has no inverse in the completed ring."""


class ModelError(ValueError):
    """Raised when a manifold model fails its consistency checks."""


class QHElement:
    """Finite sum of basis classes tensored with exponentials, canonical form.

    Keys of the internal map are (basis index, exponent class); zero
    coefficients are never stored.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms=()) -> None:
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict = {}
        for key, q in items:
            i, B = key
            if not isinstance(B, SphereClass):
                B = SphereClass(tuple(B))
            q = _frac(q)
            if q == 0:
                continue
            key = (int(i), B)
            total = acc.get(key, Fraction(0)) + q
            if total == 0:
                acc.pop(key, None)
            else:
                acc[key] = total
        self._terms = acc

    @property
    def terms(self) -> dict:
        """Copy of the coefficient map keyed by (basis index, exponent)."""
        return dict(self._terms)

    def support_classes(self) -> Iterator[SphereClass]:
        return (B for (_, B) in self._terms)

    def coefficient(self, i: int, B: SphereClass) -> Fraction:
        return self._terms.get((i, B), Fraction(0))

    def is_zero(self) -> bool:
        return not self._terms

    def __len__(self) -> int:
        return len(self._terms)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, QHElement):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        return hash(frozenset(self._terms.items()))

    def __add__(self, other: "QHElement") -> "QHElement":
        if not isinstance(other, QHElement):
            return NotImplemented
        merged = dict(self._terms)
        for key, q in other._terms.items():
            total = merged.get(key, Fraction(0)) + q
            if total == 0:
                merged.pop(key, None)
            else:
                merged[key] = total
        return _raw(merged)

    def __neg__(self) -> "QHElement":
        return _raw({key: -q for key, q in self._terms.items()})

    def __sub__(self, other: "QHElement") -> "QHElement":
        if not isinstance(other, QHElement):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other) -> "QHElement":
        if isinstance(other, QHElement):
            raise TypeError(
                "element products need a model; use quantum_product(model, x, y)"
            )
        q = _frac(other)
        if q == 0:
            return QHElement()
        return _raw({key: q * c for key, c in self._terms.items()})

    def __rmul__(self, other) -> "QHElement":
        return self.__mul__(other)

    def __repr__(self) -> str:
        if self.is_zero():
            return "QHElement(0)"
        n = len(self._terms)
        return f"QHElement({n} term{'s' if n != 1 else ''})"


def _raw(terms: dict) -> QHElement:
    out = QHElement()
    out._terms = terms
    return out


def nov_scale(x: QHElement, lam: NovikovElement) -> QHElement:
    """Scale a module element by a ring element, exponents adding termwise."""
    acc: dict = {}
    for (i, B), q in x._terms.items():
        for C, r in lam.terms.items():
            key = (i, B + C)
            total = acc.get(key, Fraction(0)) + q * r
            if total == 0:
                acc.pop(key, None)
            else:
                acc[key] = total
    return _raw(acc)


def _invert_rational_matrix(rows: Sequence[Sequence[Fraction]]) -> list:
    """Gauss-Jordan inverse of an exact rational matrix."""
    n = len(rows)
    aug = [
        [Fraction(v) for v in row] + [Fraction(int(i == j)) for j in range(n)]
        for i, row in enumerate(rows)
    ]
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if pivot is None:
            raise ModelError("pairing matrix is singular")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv = Fraction(1) / aug[col][col]
        aug[col] = [v * inv for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                factor = aug[r][col]
                aug[r] = [v - factor * w for v, w in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


class ManifoldModel:
    """Homology basis, pairing, and three-point table for one manifold.

    ``basis`` is a sequence of (name, degree) pairs; ``gw`` is an iterable of
    entries ((i, j, k), B, value) with classes given by index or name.  The
    table is stored symmetrized; entries given in several orders must agree.
    """

    def __init__(
        self,
        name: str,
        dim: int,
        sphere_generators: Sequence[str],
        basis: Sequence,
        pairing: Sequence[Sequence[RationalLike]],
        omega: Sequence[RationalLike],
        c1: Sequence[int],
        gw: Iterable,
        validate: bool = True,
    ) -> None:
        self.name = str(name)
        self.dim = int(dim)
        self.sphere_generators = tuple(str(g) for g in sphere_generators)
        self.basis = tuple((str(n), int(d)) for n, d in basis)
        self.basis_names = tuple(n for n, _ in self.basis)
        self.degrees = tuple(d for _, d in self.basis)
        self.pairing = tuple(tuple(_frac(v) for v in row) for row in pairing)
        self.omega = OmegaFunctional(tuple(omega))
        self.c1 = ChernFunctional(tuple(c1))
        self.rank = len(self.sphere_generators)
        self._index = {n: i for i, n in enumerate(self.basis_names)}
        if len(self._index) != len(self.basis):
            raise ModelError("basis names must be distinct")
        self.gw = self._canonical_gw(gw)
        if validate:
            problems = validate_model(self)
            if problems:
                raise ModelError("; ".join(problems))
        self._finish()

    # -- construction helpers -------------------------------------------

    def _canonical_gw(self, entries: Iterable) -> dict:
        table: dict = {}
        for classes, B, value in entries:
            idx = tuple(sorted(self._as_index(c) for c in classes))
            if len(idx) != 3:
                raise ModelError("each table entry takes exactly three classes")
            if not isinstance(B, SphereClass):
                B = SphereClass(tuple(B))
            value = _frac(value)
            key = (idx, B)
            if key in table and table[key] != value:
                raise ModelError(f"conflicting table values for {key}")
            table[key] = value
        return {k: v for k, v in table.items() if v != 0}

    def _finish(self) -> None:
        n = len(self.basis)
        zero = SphereClass.zero(self.rank)
        inv = _invert_rational_matrix(self.pairing)
        self._dual = [
            [(l, inv[k][l]) for l in range(n) if inv[k][l] != 0] for k in range(n)
        ]
        self._zero_class = zero
        self._pairs_all: dict = {}
        self._pairs_classical: dict = {}
        for ((i, j, k), B), value in self.gw.items():
            for a, b, c in {(i, j, k), (i, k, j), (j, k, i)}:
                key = (min(a, b), max(a, b))
                self._pairs_all.setdefault(key, []).append((c, B, value))
                if B == zero:
                    self._pairs_classical.setdefault(key, []).append((c, B, value))
        fund = [i for i, d in enumerate(self.degrees) if d == self.dim]
        self._fund = fund[0]

    def _as_index(self, c) -> int:
        if isinstance(c, str):
            if c not in self._index:
                raise ModelError(f"unknown basis class {c!r}")
            return self._index[c]
        i = int(c)
        if not 0 <= i < len(self.basis):
            raise ModelError(f"basis index {i} out of range")
        return i

    # -- basic queries ----------------------------------------------------

    def basis_index(self, name: str) -> int:
        return self._as_index(name)

    def basis_element(self, c, B: Optional[SphereClass] = None) -> QHElement:
        i = self._as_index(c)
        return _raw({(i, B if B is not None else self._zero_class): Fraction(1)})

    def unit(self) -> QHElement:
        """The fundamental class, the identity for both products."""
        return self.basis_element(self._fund)

    def zero_class(self) -> SphereClass:
        return self._zero_class

    def gw_value(self, a, b, c, B: SphereClass) -> Fraction:
        idx = tuple(sorted(self._as_index(x) for x in (a, b, c)))
        return self.gw.get((idx, B), Fraction(0))

    def degree(self, x: QHElement) -> Optional[Fraction]:
        """Common degree of all terms, None for zero, error if mixed."""
        if x.is_zero():
            return None
        degs = {self.degrees[i] + 2 * self.c1(B) for (i, B) in x._terms}
        if len(degs) > 1:
            raise ValueError(f"element is not graded: degrees {sorted(degs)}")
        return degs.pop()

    def element(self, text: str) -> QHElement:
        return parse_qh(text, self)

    def format(self, x: QHElement) -> str:
        return format_qh(x, self)

    def __repr__(self) -> str:
        return f"ManifoldModel({self.name!r}, dim={self.dim}, basis={len(self.basis)})"


def validate_model(model: ManifoldModel) -> list:
    """All consistency problems found, as human-readable strings."""
    problems = []
    n = len(model.basis)
    rank = model.rank
    if model.dim <= 0 or model.dim % 2:
        problems.append("dimension must be a positive even integer")
    if len(model.omega.values) != rank or len(model.c1.values) != rank:
        problems.append("omega and c1 must list one value per sphere generator")
    for name, d in model.basis:
        if d < 0 or d > model.dim or d % 2:
            problems.append(f"basis class {name!r} has invalid degree {d}")
    fund = [i for i, d in enumerate(model.degrees) if d == model.dim]
    if len(fund) != 1:
        problems.append("exactly one basis class must sit in top degree")
        return problems
    u = fund[0]
    if len(model.pairing) != n or any(len(row) != n for row in model.pairing):
        problems.append("pairing matrix must be square of basis size")
        return problems
    for i in range(n):
        for j in range(n):
            if i < j and model.pairing[i][j] != model.pairing[j][i]:
                problems.append("pairing matrix must be symmetric")
            if (
                model.pairing[i][j] != 0
                and model.degrees[i] + model.degrees[j] != model.dim
            ):
                problems.append(
                    f"pairing of {model.basis_names[i]} and {model.basis_names[j]} "
                    "violates the degree rule"
                )
    try:
        _invert_rational_matrix(model.pairing)
    except ModelError:
        problems.append("pairing matrix is singular")
    zero = SphereClass.zero(rank)
    for ((i, j, k), B), value in model.gw.items():
        if B.rank != rank:
            problems.append("table exponent has wrong rank")
            continue
        degsum = model.degrees[i] + model.degrees[j] + model.degrees[k]
        if degsum != 2 * model.dim - 2 * model.c1(B):
            problems.append(
                f"table entry ({model.basis_names[i]},{model.basis_names[j]},"
                f"{model.basis_names[k]};{B.coords}) violates the dimension rule"
            )
        if B != zero:
            if model.omega(B) <= 0:
                problems.append("nonzero table classes must have positive area")
            if u in (i, j, k):
                problems.append(
                    "entries through the fundamental class must have B = 0"
                )
        elif u in (i, j, k):
            rest = [i, j, k]
            rest.remove(u)
            a, b = rest
            if value != model.pairing[a][b]:
                problems.append(
                    f"fundamental-class entry ({model.basis_names[a]},"
                    f"{model.basis_names[b]}) must equal the pairing"
                )
    # Every nonzero pairing must be recorded so the unit acts as identity.
    for i in range(n):
        for j in range(i, n):
            if model.pairing[i][j] != 0:
                idx = tuple(sorted((i, j, u)))
                if model.gw.get((idx, zero), Fraction(0)) != model.pairing[i][j]:
                    problems.append(
                        f"missing classical entry for pairing "
                        f"({model.basis_names[i]},{model.basis_names[j]})"
                    )
    return problems


# ---------------------------------------------------------------------------
# Products and powers.
# ---------------------------------------------------------------------------


def _contract(model: ManifoldModel, x: QHElement, y: QHElement, pairs: dict) -> QHElement:
    acc: dict = {}
    for (i, B1), c in x._terms.items():
        for (j, B2), d in y._terms.items():
            cd = c * d
            base = B1 + B2
            for k, B, value in pairs.get((min(i, j), max(i, j)), ()):
                shifted = base - B
                w = cd * value
                for l, g in model._dual[k]:
                    key = (l, shifted)
                    total = acc.get(key, Fraction(0)) + w * g
                    if total == 0:
                        acc.pop(key, None)
                    else:
                        acc[key] = total
    return _raw(acc)


def quantum_product(model: ManifoldModel, x: QHElement, y: QHElement) -> QHElement:
    """Quantum product of two module elements."""
    return _contract(model, x, y, model._pairs_all)


def classical_product(model: ManifoldModel, x: QHElement, y: QHElement) -> QHElement:
    """Cap product: the zero-exponent stratum of the same contraction."""
    return _contract(model, x, y, model._pairs_classical)


def power(model: ManifoldModel, x: QHElement, k: int) -> QHElement:
    """k-th quantum power; negative k demands an exact finite inverse."""
    k = int(k)
    if k < 0:
        x = exact_inverse(model, x)
        k = -k
    out = model.unit()
    for _ in range(k):
        out = quantum_product(model, out, x)
    return out


def power_walk(model: ManifoldModel, x: QHElement, k_max: int) -> Iterator[tuple]:
    """Yield (k, x^k) for k = 1 .. k_max, sharing work across steps."""
    acc = model.unit()
    for k in range(1, int(k_max) + 1):
        acc = quantum_product(model, acc, x)
        yield k, acc


# ---------------------------------------------------------------------------
# Inversion.
# ---------------------------------------------------------------------------


def _mult_matrix(model: ManifoldModel, x: QHElement) -> list:
    """Matrix of y -> x * y on the basis, entries in the exponent group ring."""
    n = len(model.basis)
    cols = [quantum_product(model, x, model.basis_element(j)) for j in range(n)]
    matrix = [[NovikovElement() for _ in range(n)] for _ in range(n)]
    for j, col in enumerate(cols):
        for (k, B), q in col._terms.items():
            matrix[k][j] = matrix[k][j] + NovikovElement.exp(B, q)
    return matrix


def _nov_det(matrix: list) -> NovikovElement:
    n = len(matrix)
    if n == 1:
        return matrix[0][0]
    # Expand along the row with the most zeros.
    row = max(range(n), key=lambda i: sum(e.is_zero() for e in matrix[i]))
    det = NovikovElement()
    for col in range(n):
        entry = matrix[row][col]
        if entry.is_zero():
            continue
        minor = [
            [matrix[i][j] for j in range(n) if j != col]
            for i in range(n)
            if i != row
        ]
        piece = nov_mul(entry, _nov_det(minor))
        det = det + piece if (row + col) % 2 == 0 else det - piece
    return det


def _leading_monomial(x: NovikovElement, omega: OmegaFunctional):
    """The unique maximal-area term (coefficient, class); error on a tie."""
    top = valuation(x, omega)
    leaders = [(B, q) for B, q in x.terms.items() if omega(B) == top]
    if len(leaders) != 1:
        raise NotInvertibleError(
            "no leading monomial: maximal area is attained by "
            f"{len(leaders)} terms, so the geometric series cannot start"
        )
    B, q = leaders[0]
    return q, B


def invert(
    model: ManifoldModel, x: QHElement, floor: RationalLike = Fraction(-8)
) -> QHElement:
    """Inverse of x, truncated to terms of area at least ``floor``.

    When the underlying series terminates the result is the exact inverse and
    ``quantum_product(model, x, invert(model, x))`` equals the unit.  Otherwise
    the residual x * z - 1 is supported strictly below ``floor`` whenever
    v(x) <= 0 (below ``floor + v(x)`` in general).
    """
    floor = _frac(floor)
    if x.is_zero():
        raise NotInvertibleError("the zero element has no inverse")
    matrix = _mult_matrix(model, x)
    det = _nov_det(matrix)
    if det.is_zero():
        raise NotInvertibleError(
            "multiplication matrix is singular; the element is a zero divisor"
        )
    c0, B0 = _leading_monomial(det, model.omega)
    # det = c0 e^{B0} (1 - g) with every term of g of strictly negative area.
    unit_ring = NovikovElement.one(model.rank)
    g = unit_ring - nov_mul(det, NovikovElement.exp(-B0, Fraction(1) / c0))

    # Adjugate column dual to the fundamental class: cofactors along row u.
    n = len(model.basis)
    u = model._fund
    cof: dict = {}
    for k in range(n):
        minor = [
            [matrix[i][j] for j in range(n) if j != k]
            for i in range(n)
            if i != u
        ]
        entry = _nov_det(minor) if n > 1 else unit_ring
        if (u + k) % 2:
            entry = -entry
        for B, q in entry.terms.items():
            key = (k, B)
            total = cof.get(key, Fraction(0)) + q
            if total == 0:
                cof.pop(key, None)
            else:
                cof[key] = total
    adj_col = _raw(cof)

    lead_inverse = NovikovElement.exp(-B0, Fraction(1) / c0)
    if g.is_zero():
        return nov_scale(adj_col, lead_inverse)

    # Geometric series sum g^m, kept only deep enough that every term of the
    # final inverse with area >= floor receives all of its contributions.
    top_adj = valuation(adj_col, model.omega)
    cutoff = floor + model.omega(B0) - top_adj
    series = unit_ring
    term = unit_ring
    steps = 0
    while not term.is_zero():
        term = truncate_below(nov_mul(term, g), model.omega, cutoff)
        series = series + term
        steps += 1
        if steps > 100_000:
            raise NotInvertibleError("series failed to reach the floor")
    z = nov_scale(adj_col, nov_mul(series, lead_inverse))
    return _raw(
        {(i, B): q for (i, B), q in z._terms.items() if model.omega(B) >= floor}
    )


def exact_inverse(model: ManifoldModel, x: QHElement) -> QHElement:
    """Inverse with a terminating series; error if only truncations exist."""
    z = invert(model, x)
    if quantum_product(model, x, z) != model.unit():
        raise NotInvertibleError(
            "inverse exists only as an infinite series; use invert() with a floor"
        )
    return z


# ---------------------------------------------------------------------------
# Spectral invariants of the model.
# ---------------------------------------------------------------------------


def hbar(model: ManifoldModel):
    """Least positive area carried by the table, or +infinity if classical."""
    areas = [model.omega(B) for (_, B) in model.gw if not B.is_zero()]
    return min(areas) if areas else math.inf


def rationality_index(model: ManifoldModel):
    """Positive generator of the group of generator areas, or +infinity."""
    values = [v for v in model.omega.values if v != 0]
    if not values:
        return math.inf
    denominator = math.lcm(*(v.denominator for v in values))
    numerator = math.gcd(*(abs(v.numerator * (denominator // v.denominator)) for v in values))
    return Fraction(numerator, denominator)


# ---------------------------------------------------------------------------
# Built-in models.
# ---------------------------------------------------------------------------


def model_blowup_cp2(a_squared: RationalLike) -> ManifoldModel:
    """One-point blow-up of the projective plane.

    Exponent generators are the exceptional class E and the fiber class
    F = L - E; areas are omega(E) = a^2 and omega(F) = 1 - a^2 in units of pi,
    with 0 < a^2 < 1.  Basis: the point class p, the degree-two classes E and
    F, and the fundamental class 1.
    """
    a2 = _frac(a_squared)
    if not 0 < a2 < 1:
        raise ValueError("a_squared must lie strictly between 0 and 1")
    E = (1, 0)
    F = (0, 1)
    EF = (1, 1)
    zero = (0, 0)
    gw = [
        # Classical stratum: triple intersections against the fundamental class.
        (("p", "1", "1"), zero, 1),
        (("E", "E", "1"), zero, -1),
        (("E", "F", "1"), zero, 1),
        # Exceptional-curve stratum: signs alternate with the number of E's.
        (("E", "E", "E"), E, -1),
        (("E", "E", "F"), E, 1),
        (("E", "F", "F"), E, -1),
        (("F", "F", "F"), E, 1),
        # Fiber and section strata.
        (("p", "E", "E"), F, 1),
        (("p", "p", "F"), EF, 1),
    ]
    return ManifoldModel(
        name="blowup_cp2",
        dim=4,
        sphere_generators=("E", "F"),
        basis=(("p", 0), ("E", 2), ("F", 2), ("1", 4)),
        pairing=((0, 0, 0, 1), (0, -1, 1, 0), (0, 1, 0, 0), (1, 0, 0, 0)),
        omega=(a2, 1 - a2),
        c1=(1, 2),
        gw=gw,
    )


def model_cpn(n: int, line_area: RationalLike = 1) -> ManifoldModel:
    """Complex projective space of complex dimension n.

    Basis classes are the powers of the hyperplane class, x^k of degree
    2(n - k); the single exponent generator is the line class L with
    omega(L) = ``line_area`` and c1(L) = n + 1.
    """
    n = int(n)
    if n < 1:
        raise ValueError("complex dimension must be at least 1")
    area = _frac(line_area)
    if area <= 0:
        raise ValueError("line area must be positive")
    names = ["1", "x"] + [f"x^{k}" for k in range(2, n + 1)]
    basis = [(names[k], 2 * (n - k)) for k in range(n + 1)]
    pairing = [[1 if i + j == n else 0 for j in range(n + 1)] for i in range(n + 1)]
    gw = []
    for i in range(n + 1):
        for j in range(i, n + 1):
            for k in range(j, n + 1):
                if i + j + k == n:
                    gw.append(((i, j, k), (0,), 1))
                elif i + j + k == 2 * n + 1:
                    gw.append(((i, j, k), (1,), 1))
    return ManifoldModel(
        name=f"cp{n}",
        dim=2 * n,
        sphere_generators=("L",),
        basis=basis,
        pairing=pairing,
        omega=(area,),
        c1=(n + 1,),
        gw=gw,
    )


# ---------------------------------------------------------------------------
# Text form for module elements: "q * name * e^{...}" terms joined by " + ".
# The coefficient is omitted when it is 1 and the exponential when B = 0, so
# the unit prints as "1" (the fundamental class name) and parses back.
# ---------------------------------------------------------------------------


def format_qh(x: QHElement, model: ManifoldModel) -> str:
    if x.is_zero():
        return "0"
    items = sorted(x._terms.items(), key=lambda kv: (kv[0][0], kv[0][1].coords))
    parts = []
    for (i, B), q in items:
        factors = [str(q), model.basis_names[i]]
        if not B.is_zero():
            factors.append(f"e^{{{format_exponent(B, model.sphere_generators)}}}")
        parts.append(" * ".join(factors))
    return " + ".join(parts)


def parse_qh(text: str, model: ManifoldModel) -> QHElement:
    text = text.strip()
    if text == "0":
        return QHElement()
    terms = []
    for sign, chunk, offset in _signed_chunks(text):
        factors = _split_factors(chunk)
        exponents = [f for f in factors if f.startswith("e^")]
        plain = [f for f in factors if not f.startswith("e^")]
        if len(exponents) > 1:
            raise ParseError(f"several exponentials in term at offset {offset}")
        B = (
            _parse_exp_factor(exponents[0], model.sphere_generators)
            if exponents
            else model.zero_class()
        )
        if len(plain) == 1:
            # A bare token is a basis name; "1" names the fundamental class.
            coeff, name = Fraction(1), plain[0]
        elif len(plain) == 2:
            coeff = _parse_rational(plain[0], f"term at offset {offset}")
            name = plain[1]
        else:
            raise ParseError(f"term at offset {offset} needs a basis class: {chunk!r}")
        if name not in model._index:
            raise ParseError(
                f"unknown basis class {name!r} at offset {offset}; "
                f"expected one of {list(model.basis_names)}"
            )
        terms.append(((model.basis_index(name), B), sign * coeff))
    return QHElement(terms)


# ---------------------------------------------------------------------------
# Model files: a flat JSON object with every rational rendered as a string.
# ---------------------------------------------------------------------------


def model_to_dict(model: ManifoldModel) -> dict:
    gw_rows = sorted(
        model.gw.items(), key=lambda kv: (kv[0][1].coords, kv[0][0])
    )
    return {
        "name": model.name,
        "dim": model.dim,
        "sphere_generators": list(model.sphere_generators),
        "basis": [{"name": n, "degree": d} for n, d in model.basis],
        "pairing": [[str(v) for v in row] for row in model.pairing],
        "omega": [str(v) for v in model.omega.values],
        "c1": list(model.c1.values),
        "gw": [
            {
                "classes": [model.basis_names[i] for i in idx],
                "B": [str(c) for c in B.coords],
                "value": str(value),
            }
            for (idx, B), value in gw_rows
        ],
    }


def model_from_dict(data: Mapping) -> ManifoldModel:
    try:
        gw = [
            (tuple(row["classes"]), tuple(row["B"]), row["value"])
            for row in data["gw"]
        ]
        return ManifoldModel(
            name=data["name"],
            dim=data["dim"],
            sphere_generators=data["sphere_generators"],
            basis=[(b["name"], b["degree"]) for b in data["basis"]],
            pairing=data["pairing"],
            omega=data["omega"],
            c1=data["c1"],
            gw=gw,
        )
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ModelError):
            raise
        raise ModelError(f"malformed model data: {exc}") from exc


def save_model(model: ManifoldModel, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_to_dict(model), fh, indent=2)
        fh.write("\n")


def load_model(path) -> ManifoldModel:
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    return model_from_dict(data)
