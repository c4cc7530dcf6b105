"""Sparse weighted-graded polynomials with exact rational coefficients.

A polynomial is a mapping from exponent tuples to nonzero ``gmpy2.mpq``
coefficients, attached to a :class:`Ring` that names the variables and gives
each one a positive integer weight.  Zero coefficients are never stored, so
two polynomials are equal iff their term dictionaries are equal.

Monomials are compared with the ring's monomial order.  Both supported orders
compare the weighted degree first:

* ``grevlex`` -- ties broken by reverse lexicographic order (smaller exponent
  in the last variable wins);
* ``lex``     -- ties broken lexicographically.

The canonical text form lists terms from the largest monomial down, e.g.
``3/2*y1^2*y3 - y2^2 + 5``.  :meth:`Ring.parse` reads that format back (and
also accepts parentheses and ``**`` so hand-written input is easy).
"""

from __future__ import annotations

import operator
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Iterator, Mapping, Sequence

from gmpy2 import mpq

from .errors import MissingImageError, ParseError, RingMismatchError, ZeroPolynomialError

Exponent = tuple[int, ...]

_ORDERS = ("grevlex", "lex")


def QQ(x) -> mpq:
    """Convert ints, ``Fraction``, ``mpq`` or ``"p/q"`` strings to ``mpq``."""
    if isinstance(x, str):
        return mpq(x.strip())
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    return mpq(x)


@dataclass(frozen=True)
class Ring:
    """Polynomial ring over QQ in named variables of positive integer weight."""

    names: tuple[str, ...]
    weights: tuple[int, ...]
    order: str = "grevlex"
    _keys: dict = field(default_factory=dict, compare=False, hash=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))
        object.__setattr__(self, "weights", tuple(int(w) for w in self.weights))
        if len(self.names) != len(self.weights):
            raise ValueError("one weight per variable required")
        if len(set(self.names)) != len(self.names):
            raise ValueError(f"duplicate variable names in {self.names}")
        if any(w < 1 for w in self.weights):
            raise ValueError("weights must be >= 1")
        if self.order not in _ORDERS:
            raise ValueError(f"unknown monomial order {self.order!r}")

    @classmethod
    def from_string(cls, spec: str, order: str = "grevlex") -> "Ring":
        """``Ring.from_string("z1:3 z2:3 y1:2 y2:2 y3:2")``; weight defaults to 1."""
        names, weights = [], []
        for tok in spec.replace(",", " ").split():
            name, _, w = tok.partition(":")
            names.append(name)
            weights.append(int(w) if w else 1)
        return cls(tuple(names), tuple(weights), order)

    def __str__(self) -> str:
        inner = ", ".join(f"{n}:{w}" for n, w in zip(self.names, self.weights))
        return f"QQ[{inner}] ({self.order})"

    @cached_property
    def index(self) -> dict[str, int]:
        return {n: i for i, n in enumerate(self.names)}

    @property
    def ngens(self) -> int:
        return len(self.names)

    @property
    def zero(self) -> "Poly":
        return Poly(self, {})

    @property
    def one(self) -> "Poly":
        return self.const(1)

    def const(self, c) -> "Poly":
        c = QQ(c)
        return Poly(self, {(0,) * self.ngens: c} if c else {})

    def gen(self, name: str) -> "Poly":
        try:
            i = self.index[name]
        except KeyError:
            raise KeyError(f"{name!r} is not a variable of {self}") from None
        e = [0] * self.ngens
        e[i] = 1
        return Poly(self, {tuple(e): mpq(1)})

    def gens(self) -> tuple["Poly", ...]:
        return tuple(self.gen(n) for n in self.names)

    def monomial(self, exps: Sequence[int], coeff=1) -> "Poly":
        c = QQ(coeff)
        return Poly(self, {tuple(exps): c} if c else {})

    def __call__(self, x) -> "Poly":
        if isinstance(x, Poly):
            return x.embed(self)
        if isinstance(x, str):
            return self.parse(x)
        return self.const(x)

    # -- monomial bookkeeping ------------------------------------------------

    def mono_degree(self, exps: Exponent) -> int:
        return sum(e * w for e, w in zip(exps, self.weights))

    def sort_key(self, exps: Exponent) -> tuple:
        """Key such that ``sort_key(m1) > sort_key(m2)`` iff m1 > m2."""
        key = self._keys.get(exps)
        if key is None:
            deg = self.mono_degree(exps)
            if self.order == "grevlex":
                key = (deg, tuple(-e for e in reversed(exps)))
            else:
                key = (deg, exps)
            self._keys[exps] = key
        return key

    def monomials_of_degree(self, d: int, extra: Sequence[tuple[Sequence[int], int]] = ()) -> list[Exponent]:
        """All exponent vectors of weighted degree ``d``, sorted descending.

        ``extra`` holds further ``(weight_vector, degree)`` constraints, used to
        restrict to a finer multigrading.
        """
        out: list[Exponent] = []
        n = self.ngens
        w = self.weights

        def rec(i: int, left: int, acc: list[int]):
            if i == n - 1:
                if left % w[i] == 0:
                    out.append(tuple(acc + [left // w[i]]))
                return
            for e in range(left // w[i] + 1):
                rec(i + 1, left - e * w[i], acc + [e])

        if d < 0:
            return []
        if n == 0:
            return [()] if d == 0 else []
        rec(0, d, [])
        for wv, deg in extra:
            out = [m for m in out if sum(a * b for a, b in zip(m, wv)) == deg]
        out.sort(key=self.sort_key, reverse=True)
        return out

    def sub_ring(self, names: Iterable[str]) -> "Ring":
        names = list(names)
        return Ring(tuple(names), tuple(self.weights[self.index[n]] for n in names), self.order)

    def to_json(self) -> dict:
        return {"names": list(self.names), "weights": list(self.weights), "order": self.order}

    @classmethod
    def from_json(cls, data: Mapping) -> "Ring":
        return cls(tuple(data["names"]), tuple(data["weights"]), data.get("order", "grevlex"))

    # -- parsing ---------------------------------------------------------------

    def parse(self, text: str) -> "Poly":
        return _Parser(self, text).parse()


class Poly:
    """Immutable sparse polynomial over QQ in a :class:`Ring`."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: Ring, terms: Mapping[Exponent, object] | None = None):
        self.ring = ring
        if terms:
            clean = {}
            for e, c in terms.items():
                c = c if type(c) is type(mpq()) else QQ(c)
                if c:
                    clean[tuple(e)] = c
            self.terms = clean
        else:
            self.terms = {}

    @classmethod
    def _raw(cls, ring: Ring, terms: dict) -> "Poly":
        p = cls.__new__(cls)
        p.ring = ring
        p.terms = terms
        return p

    # -- basic protocol --------------------------------------------------------

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self) -> Iterator[tuple[Exponent, mpq]]:
        return iter(self.sorted_terms())

    def __eq__(self, other) -> bool:
        if isinstance(other, Poly):
            return self.ring == other.ring and self.terms == other.terms
        try:
            other = self.ring.const(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.ring.names, frozenset(self.terms.items())))

    def __repr__(self) -> str:
        return f"Poly({self.to_text()!r})"

    def __str__(self) -> str:
        return self.to_text()

    # -- arithmetic ------------------------------------------------------------

    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.ring is not self.ring and other.ring != self.ring:
                raise RingMismatchError(f"{self.ring} vs {other.ring}")
            return other
        return self.ring.const(other)

    def __add__(self, other) -> "Poly":
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        if not other.terms:
            return self
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e)
            if s is None:
                out[e] = c
            else:
                s = s + c
                if s:
                    out[e] = s
                else:
                    del out[e]
        return Poly._raw(self.ring, out)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly._raw(self.ring, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other) -> "Poly":
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "Poly":
        return (-self) + other

    def __mul__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            try:
                c = QQ(other)
            except TypeError:
                return NotImplemented
            return self.scale(c)
        if other.ring is not self.ring and other.ring != self.ring:
            raise RingMismatchError(f"{self.ring} vs {other.ring}")
        a, b = self.terms, other.terms
        if len(a) < len(b):
            a, b = b, a
        out: dict = {}
        get = out.get
        add = operator.add
        for e2, c2 in b.items():
            for e1, c1 in a.items():
                e = tuple(map(add, e1, e2))
                out[e] = get(e, 0) + c1 * c2
        return Poly._raw(self.ring, {e: c for e, c in out.items() if c})

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Poly":
        if isinstance(other, Poly):
            return NotImplemented
        return self.scale(1 / QQ(other))

    def scale(self, c) -> "Poly":
        c = QQ(c)
        if not c:
            return self.ring.zero
        return Poly._raw(self.ring, {e: v * c for e, v in self.terms.items()})

    def __pow__(self, n: int) -> "Poly":
        if not isinstance(n, int) or n < 0:
            raise ValueError("only non-negative integer powers")
        result = self.ring.one
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def mul_monomial(self, exps: Exponent, c=1) -> "Poly":
        c = QQ(c)
        if not c:
            return self.ring.zero
        add = operator.add
        return Poly._raw(self.ring, {tuple(map(add, e, exps)): v * c for e, v in self.terms.items()})

    # -- structure -------------------------------------------------------------

    def sorted_terms(self) -> list[tuple[Exponent, mpq]]:
        key = self.ring.sort_key
        return sorted(self.terms.items(), key=lambda t: key(t[0]), reverse=True)

    def leading_monomial(self) -> Exponent:
        if not self.terms:
            raise ZeroPolynomialError("zero polynomial has no leading monomial")
        return max(self.terms, key=self.ring.sort_key)

    def leading_coefficient(self) -> mpq:
        return self.terms[self.leading_monomial()]

    def monic(self) -> "Poly":
        return self.scale(1 / self.leading_coefficient())

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and not any(next(iter(self.terms))))

    def constant_term(self) -> mpq:
        return self.terms.get((0,) * self.ring.ngens, mpq(0))

    def is_homogeneous(self) -> bool:
        return weighted_degree(self) is not None if self.terms else True

    def degree_in(self, name: str) -> int:
        i = self.ring.index[name]
        return max((e[i] for e in self.terms), default=-1)

    def variables(self) -> set[str]:
        used = set()
        for e in self.terms:
            used.update(n for n, k in zip(self.ring.names, e) if k)
        return used

    def free_of(self, names: Iterable[str]) -> bool:
        return not (self.variables() & set(names))

    def coefficient(self, monomial: Mapping[str, int] | Exponent) -> mpq:
        if isinstance(monomial, Mapping):
            e = [0] * self.ring.ngens
            for n, k in monomial.items():
                e[self.ring.index[n]] = k
            monomial = tuple(e)
        return self.terms.get(tuple(monomial), mpq(0))

    def coefficients_in(self, names: Sequence[str]) -> dict[Exponent, "Poly"]:
        """Split as ``sum_k coeff_k * names^k``; coefficients live in the same ring."""
        idx = [self.ring.index[n] for n in names]
        out: dict[Exponent, dict] = {}
        for e, c in self.terms.items():
            k = tuple(e[i] for i in idx)
            rest = list(e)
            for i in idx:
                rest[i] = 0
            out.setdefault(k, {})[tuple(rest)] = c
        return {k: Poly._raw(self.ring, t) for k, t in out.items()}

    def homogeneous_part(self, names: Sequence[str], degree: int) -> "Poly":
        """Terms whose total (unweighted) degree in ``names`` equals ``degree``."""
        idx = [self.ring.index[n] for n in names]
        return Poly._raw(self.ring, {e: c for e, c in self.terms.items() if sum(e[i] for i in idx) == degree})

    def diff(self, name: str) -> "Poly":
        i = self.ring.index[name]
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                f = list(e)
                f[i] -= 1
                out[tuple(f)] = c * e[i]
        return Poly._raw(self.ring, out)

    def evaluate(self, values: Mapping[str, object] | Sequence) -> mpq:
        if isinstance(values, Mapping):
            try:
                vals = [QQ(values[n]) for n in self.ring.names]
            except KeyError as exc:
                raise MissingImageError(f"no value for {exc.args[0]}") from None
        else:
            vals = [QQ(v) for v in values]
        total = mpq(0)
        for e, c in self.terms.items():
            t = c
            for v, k in zip(vals, e):
                if k:
                    t = t * v**k
            total += t
        return total

    def subs(self, mapping: Mapping[str, object]) -> "Poly":
        """Partial substitution inside the same ring (unlisted variables fixed)."""
        images = {n: self.ring.gen(n) for n in self.ring.names}
        for n, val in mapping.items():
            images[n] = val if isinstance(val, Poly) else self.ring.const(val)
        return ring_hom_apply(images, self, self.ring)

    def embed(self, ring: Ring) -> "Poly":
        """Reinterpret in ``ring`` by variable name."""
        if ring == self.ring:
            return self
        pos = []
        for i, n in enumerate(self.ring.names):
            if n in ring.index:
                pos.append((i, ring.index[n]))
        used = {i for i, _ in pos}
        out = {}
        for e, c in self.terms.items():
            if any(k for i, k in enumerate(e) if i not in used):
                missing = [n for i, n in enumerate(self.ring.names) if e[i] and i not in used]
                raise RingMismatchError(f"variables {missing} not in target ring")
            f = [0] * ring.ngens
            for i, j in pos:
                f[j] = e[i]
            out[tuple(f)] = c
        return Poly._raw(ring, out)

    def divide_exact(self, other: "Poly") -> "Poly":
        """Exact quotient ``self / other``; raises if the division leaves a remainder."""
        from .errors import InexactDivisionError

        other = self._coerce(other)
        if not other.terms:
            raise ZeroDivisionError("division by the zero polynomial")
        lm = other.leading_monomial()
        lc = other.terms[lm]
        rem = self
        quot: dict = {}
        while rem.terms:
            m = rem.leading_monomial()
            if any(a < b for a, b in zip(m, lm)):
                raise InexactDivisionError(f"{other} does not divide {self}")
            q = tuple(a - b for a, b in zip(m, lm))
            c = rem.terms[m] / lc
            quot[q] = c
            rem = rem - other.mul_monomial(q, c)
        return Poly._raw(self.ring, quot)

    # -- text ------------------------------------------------------------------

    def to_text(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            mono = _mono_text(self.ring.names, e)
            neg = c < 0
            a = -c if neg else c
            if mono and a == 1:
                body = mono
            elif mono:
                body = f"{a}*{mono}"
            else:
                body = str(a)
            if not parts:
                parts.append(f"-{body}" if neg else body)
            else:
                parts.append(f"- {body}" if neg else f"+ {body}")
        return " ".join(parts)


def _mono_text(names: Sequence[str], e: Exponent) -> str:
    out = []
    for n, k in zip(names, e):
        if k == 1:
            out.append(n)
        elif k:
            out.append(f"{n}^{k}")
    return "*".join(out)


def weighted_degree(p: Poly) -> int | None:
    """Weighted degree of a homogeneous polynomial; ``None`` if inhomogeneous."""
    if not p.terms:
        raise ZeroPolynomialError("the zero polynomial has no degree")
    degs = {p.ring.mono_degree(e) for e in p.terms}
    return degs.pop() if len(degs) == 1 else None


def ring_hom_apply(assignment: Mapping[str, object], p: Poly, target: Ring | None = None) -> Poly:
    """Pull ``p`` back along the homomorphism sending each variable to its image.

    Every variable of ``p.ring`` needs an image (scalars are allowed); images
    must share one ring, which is ``target`` when given.
    """
    images: list[Poly | None] = []
    ring = target
    for n in p.ring.names:
        img = assignment.get(n)
        if isinstance(img, Poly):
            if ring is None:
                ring = img.ring
            elif img.ring != ring:
                raise RingMismatchError(f"image of {n} lives in {img.ring}, expected {ring}")
        images.append(img)
    if ring is None:
        raise MissingImageError("cannot infer target ring: no polynomial images")
    for i, (n, img) in enumerate(zip(p.ring.names, images)):
        if img is None:
            if n in assignment:
                raise MissingImageError(f"image of {n} is None")
            if any(e[i] for e in p.terms):
                raise MissingImageError(f"no image for variable {n}")
            continue
        if not isinstance(img, Poly):
            images[i] = ring.const(img)

    memo: dict[Exponent, Poly] = {(0,) * p.ring.ngens: ring.one}

    def image_of(e: Exponent) -> Poly:
        got = memo.get(e)
        if got is not None:
            return got
        last = max(i for i, k in enumerate(e) if k)
        f = list(e)
        f[last] -= 1
        got = image_of(tuple(f)) * images[last]
        memo[e] = got
        return got

    out: dict = {}
    for e, c in p.terms.items():
        for m, v in image_of(e).terms.items():
            out[m] = out.get(m, 0) + c * v
    return Poly._raw(ring, {m: v for m, v in out.items() if v})


def perfect_square_root(p: Poly) -> Poly | None:
    """Return ``q`` with ``q*q == p`` and positive leading coefficient, or ``None``.

    Works for any polynomial; the leading term of the root is the square root
    of the leading term, and later terms come from dividing the leading term
    of the running remainder by twice the root's leading term.
    """
    if not p.terms:
        return p
    lm = p.leading_monomial()
    lc = p.terms[lm]
    if any(k % 2 for k in lm) or lc < 0:
        return None
    r_lc = _rational_sqrt(lc)
    if r_lc is None:
        return None
    root_lm = tuple(k // 2 for k in lm)
    root = p.ring.monomial(root_lm, r_lc)
    two_lc = 2 * r_lc
    p_min = p.ring.sort_key(min(p.terms, key=p.ring.sort_key))
    rem = p - root * root
    # root monomials strictly decrease and each must square to at least the
    # smallest monomial of p, so the loop runs over a finite set
    while rem.terms:
        m = rem.leading_monomial()
        if any(a < b for a, b in zip(m, root_lm)):
            return None
        q = tuple(a - b for a, b in zip(m, root_lm))
        if p.ring.sort_key(q) >= p.ring.sort_key(root_lm):
            return None
        if p.ring.sort_key(tuple(2 * k for k in q)) < p_min:
            return None
        term = p.ring.monomial(q, rem.terms[m] / two_lc)
        rem = rem - term * (root + root + term)
        root = root + term
    return root


def _rational_sqrt(c: mpq) -> mpq | None:
    from gmpy2 import is_square, isqrt

    n, d = int(c.numerator), int(c.denominator)
    if n < 0 or not is_square(n) or not is_square(d):
        return None
    return mpq(int(isqrt(n)), int(isqrt(d)))


# -- parser ---------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+/\d+|\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|\^|[-+*()]))")


class _Parser:
    def __init__(self, ring: Ring, text: str):
        self.ring = ring
        self.tokens = self._tokenize(text)
        self.pos = 0

    @staticmethod
    def _tokenize(text: str) -> list[tuple[str, str]]:
        out, i = [], 0
        text = text.strip()
        while i < len(text):
            m = _TOKEN.match(text, i)
            if not m or m.end() == i:
                raise ParseError(f"unexpected character at {i}: {text[i:i + 10]!r}")
            num, name, op = m.groups()
            if num is not None:
                out.append(("num", num))
            elif name is not None:
                out.append(("name", name))
            else:
                out.append(("op", "^" if op == "**" else op))
            i = m.end()
            while i < len(text) and text[i].isspace():
                i += 1
        return out

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else (None, None)

    def take(self):
        tok = self.peek()
        self.pos += 1
        return tok

    def parse(self) -> Poly:
        if not self.tokens:
            raise ParseError("empty polynomial text")
        p = self.expr()
        if self.pos != len(self.tokens):
            raise ParseError(f"trailing input at token {self.peek()}")
        return p

    def expr(self) -> Poly:
        sign = 1
        if self.peek() == ("op", "-"):
            self.take()
            sign = -1
        elif self.peek() == ("op", "+"):
            self.take()
        total = self.term().scale(sign)
        while self.peek() in (("op", "+"), ("op", "-")):
            _, op = self.take()
            t = self.term()
            total = total + t if op == "+" else total - t
        return total

    def term(self) -> Poly:
        p = self.factor()
        while self.peek() == ("op", "*"):
            self.take()
            p = p * self.factor()
        return p

    def factor(self) -> Poly:
        kind, val = self.take()
        if kind == "num":
            base = self.ring.const(QQ(val))
        elif kind == "name":
            if val not in self.ring.index:
                raise ParseError(f"unknown variable {val!r} for {self.ring}")
            base = self.ring.gen(val)
        elif (kind, val) == ("op", "("):
            base = self.expr()
            if self.take() != ("op", ")"):
                raise ParseError("missing ')'")
        elif (kind, val) == ("op", "-"):
            return -self.factor()
        else:
            raise ParseError(f"unexpected token {val!r}")
        if self.peek() == ("op", "^"):
            self.take()
            kind, val = self.take()
            if kind != "num" or "/" in val:
                raise ParseError("exponent must be a non-negative integer")
            base = base ** int(val)
        return base
