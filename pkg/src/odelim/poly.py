"""Sparse multivariate polynomials over exact rationals or a prime field.

Polynomials live in one of three variable regimes:

* ``state``   -- the phase-space variables x1 .. xn of a dynamical system;
* ``deriv``   -- the formal derivatives x1, x1', x1'', ..., x1^(k) of the
  first coordinate (this is where minimal differential polynomials live);
* ``mixed``   -- the derivative block together with x2 .. xn, used while
  prolonging relations one derivative order at a time.

Everything is ordered by graded lexicographic order.  Ties in total degree
are broken by variable precedence: x1 > x2 > ... > xn in the state regime
and x1^(k) > ... > x1' > x1 in the derivative/mixed regimes.  The order is
the single canonical choice used for leading terms, pivot selection and
text rendering.

Terms are kept in a hash map from exponent tuples to nonzero coefficients;
a sorted view is cached on first use.  The workloads downstream are
evaluation-heavy rather than multiplication-heavy, so no fancier term
store is warranted.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .arith import PrimeField
from .errors import ParseError


# ---------------------------------------------------------------------------
# coefficient rings


class RationalRing:
    """Exact rational coefficients (fractions.Fraction)."""

    name = "QQ"
    zero = Fraction(0)
    one = Fraction(1)

    @staticmethod
    def coerce(c):
        if isinstance(c, Fraction):
            return c
        return Fraction(c)

    @staticmethod
    def add(a, b):
        return a + b

    @staticmethod
    def sub(a, b):
        return a - b

    @staticmethod
    def mul(a, b):
        return a * b

    @staticmethod
    def neg(a):
        return -a

    @staticmethod
    def div(a, b):
        return Fraction(a, 1) / b

    def __repr__(self):
        return "QQ"

    def __eq__(self, other):
        return isinstance(other, RationalRing)

    def __hash__(self):
        return hash("RationalRing")


QQ = RationalRing()


class GF:
    """Coefficients in a prime field, stored as plain ints in [0, p)."""

    def __init__(self, p):
        self.field = p if isinstance(p, PrimeField) else PrimeField(p)
        self.p = self.field.p
        self.zero = 0
        self.one = 1 % self.p

    @property
    def name(self):
        return f"GF({self.p})"

    def coerce(self, c):
        return self.field.reduce(c)

    def add(self, a, b):
        r = a + b
        return r - self.p if r >= self.p else r

    def sub(self, a, b):
        r = a - b
        return r + self.p if r < 0 else r

    def mul(self, a, b):
        return a * b % self.p

    def neg(self, a):
        return self.p - a if a else 0

    def div(self, a, b):
        return a * self.field.inv(b) % self.p

    def __repr__(self):
        return self.name

    def __eq__(self, other):
        return isinstance(other, GF) and other.p == self.p

    def __hash__(self):
        return hash(("GF", self.p))


# ---------------------------------------------------------------------------
# variable spaces


def _deriv_name(k: int) -> str:
    if k == 0:
        return "x1"
    if k <= 2:
        return "x1" + "'" * k
    return f"x1^({k})"


class VarSpace:
    """An ordered variable set together with its graded-lex precedence."""

    __slots__ = ("kind", "n", "order", "names", "_prec")

    def __init__(self, kind, n, order, names, prec):
        self.kind = kind
        self.n = n          # number of state variables (1 for pure derivative)
        self.order = order  # highest derivative order (None for state)
        self.names = names
        self._prec = prec   # storage indices from highest precedence to lowest

    @staticmethod
    def state(n: int) -> "VarSpace":
        if n < 1:
            raise ValueError("need at least one state variable")
        names = tuple(f"x{i}" for i in range(1, n + 1))
        return VarSpace("state", n, None, names, tuple(range(n)))

    @staticmethod
    def deriv(order: int) -> "VarSpace":
        if order < 0:
            raise ValueError("derivative order must be nonnegative")
        names = tuple(_deriv_name(k) for k in range(order + 1))
        return VarSpace("deriv", 1, order, names, tuple(range(order, -1, -1)))

    @staticmethod
    def mixed(order: int, n: int) -> "VarSpace":
        if order < 0 or n < 1:
            raise ValueError("bad mixed space parameters")
        names = tuple(_deriv_name(k) for k in range(order + 1))
        names += tuple(f"x{i}" for i in range(2, n + 1))
        prec = tuple(range(order, -1, -1)) + tuple(range(order + 1, order + n))
        return VarSpace("mixed", n, order, names, prec)

    @property
    def nvars(self) -> int:
        return len(self.names)

    def sort_key(self, exponents):
        """Ascending graded-lex key for an exponent tuple."""
        return (sum(exponents), tuple(exponents[i] for i in self._prec))

    def state_index(self, i: int) -> int:
        """Storage index of the state variable x_i (1-based)."""
        if self.kind == "state":
            if 1 <= i <= self.n:
                return i - 1
        elif self.kind in ("deriv", "mixed"):
            if i == 1:
                return 0  # x1 is the order-0 derivative slot
            if self.kind == "mixed" and 2 <= i <= self.n:
                return self.order + i - 1
        raise ValueError(f"no state variable x{i} in this {self.kind} space")

    def deriv_index(self, k: int) -> int:
        """Storage index of the k-th derivative of x1."""
        if self.kind in ("deriv", "mixed") and 0 <= k <= self.order:
            return k
        raise ValueError(f"no derivative of order {k} in this {self.kind} space")

    def __eq__(self, other):
        return (
            isinstance(other, VarSpace)
            and self.kind == other.kind
            and self.n == other.n
            and self.order == other.order
        )

    def __hash__(self):
        return hash((self.kind, self.n, self.order))

    def __repr__(self):
        return f"VarSpace({self.kind}, vars={self.names})"


# ---------------------------------------------------------------------------
# polynomials


class SparsePoly:
    """Immutable sparse polynomial: exponent tuple -> nonzero coefficient."""

    __slots__ = ("space", "ring", "terms", "_sorted")

    def __init__(self, space, ring, terms, _clean=False):
        self.space = space
        self.ring = ring
        if _clean:
            self.terms = terms
        else:
            clean = {}
            nvars = space.nvars
            for exps, c in terms.items():
                exps = tuple(exps)
                if len(exps) != nvars:
                    raise ValueError(
                        f"exponent tuple {exps} does not match {nvars} variables"
                    )
                if any(e < 0 for e in exps):
                    raise ValueError(f"negative exponent in {exps}")
                c = ring.coerce(c)
                if c != ring.zero:
                    prev = clean.get(exps)
                    if prev is None:
                        clean[exps] = c
                    else:
                        s = ring.add(prev, c)
                        if s == ring.zero:
                            del clean[exps]
                        else:
                            clean[exps] = s
            self.terms = clean
        self._sorted = None

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero(space, ring=QQ):
        return SparsePoly(space, ring, {}, _clean=True)

    @staticmethod
    def constant(space, c, ring=QQ):
        c = ring.coerce(c)
        if c == ring.zero:
            return SparsePoly.zero(space, ring)
        return SparsePoly(space, ring, {(0,) * space.nvars: c}, _clean=True)

    @staticmethod
    def variable(space, index, ring=QQ):
        exps = [0] * space.nvars
        exps[index] = 1
        return SparsePoly(space, ring, {tuple(exps): ring.one}, _clean=True)

    @staticmethod
    def monomial(space, exps, c, ring=QQ):
        return SparsePoly(space, ring, {tuple(exps): c})

    # -- basic views ---------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def __len__(self):
        return len(self.terms)

    def __bool__(self):
        return bool(self.terms)

    def sorted_terms(self, reverse=False):
        """Terms as (exponents, coefficient), ascending graded-lex."""
        if self._sorted is None:
            key = self.space.sort_key
            self._sorted = sorted(self.terms.items(), key=lambda t: key(t[0]))
        return list(reversed(self._sorted)) if reverse else list(self._sorted)

    def total_degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def leading_term(self):
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        return self.sorted_terms()[-1]

    def leading_monomial(self):
        return self.leading_term()[0]

    def leading_coefficient(self):
        return self.leading_term()[1]

    def coefficient(self, exps):
        return self.terms.get(tuple(exps), self.ring.zero)

    def support(self):
        return set(self.terms)

    def max_exponents(self):
        """Componentwise maximum exponent over the support."""
        maxe = [0] * self.space.nvars
        for exps in self.terms:
            for i, e in enumerate(exps):
                if e > maxe[i]:
                    maxe[i] = e
        return tuple(maxe)

    # -- ring operations -----------------------------------------------------

    def _check_compatible(self, other):
        if self.space != other.space:
            raise ValueError(
                f"variable-set mismatch: {self.space.names} vs {other.space.names}"
            )
        if self.ring != other.ring:
            raise ValueError(f"coefficient-ring mismatch: {self.ring} vs {other.ring}")

    def __add__(self, other):
        if not isinstance(other, SparsePoly):
            other = SparsePoly.constant(self.space, other, self.ring)
        self._check_compatible(other)
        ring = self.ring
        zero = ring.zero
        out = dict(self.terms)
        for exps, c in other.terms.items():
            prev = out.get(exps)
            if prev is None:
                out[exps] = c
            else:
                s = ring.add(prev, c)
                if s == zero:
                    del out[exps]
                else:
                    out[exps] = s
        return SparsePoly(self.space, ring, out, _clean=True)

    def __radd__(self, other):
        return self.__add__(other)

    def __neg__(self):
        neg = self.ring.neg
        return SparsePoly(
            self.space, self.ring, {e: neg(c) for e, c in self.terms.items()}, _clean=True
        )

    def __sub__(self, other):
        if not isinstance(other, SparsePoly):
            other = SparsePoly.constant(self.space, other, self.ring)
        return self.__add__(-other)

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        if not isinstance(other, SparsePoly):
            return self.scale(other)
        self._check_compatible(other)
        ring = self.ring
        zero = ring.zero
        mul, add = ring.mul, ring.add
        # iterate over the smaller operand outside for fewer dict rebuilds
        a, b = (self.terms, other.terms)
        if len(a) > len(b):
            a, b = b, a
        out = {}
        for ea, ca in a.items():
            for eb, cb in b.items():
                exps = tuple(x + y for x, y in zip(ea, eb))
                prod = mul(ca, cb)
                prev = out.get(exps)
                if prev is None:
                    if prod != zero:
                        out[exps] = prod
                else:
                    s = add(prev, prod)
                    if s == zero:
                        del out[exps]
                    else:
                        out[exps] = s
        return SparsePoly(self.space, self.ring, out, _clean=True)

    def __rmul__(self, other):
        return self.scale(other)

    def scale(self, c):
        c = self.ring.coerce(c)
        if c == self.ring.zero:
            return SparsePoly.zero(self.space, self.ring)
        mul = self.ring.mul
        return SparsePoly(
            self.space, self.ring, {e: mul(k, c) for e, k in self.terms.items()}, _clean=True
        )

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative power of a polynomial")
        result = SparsePoly.constant(self.space, self.ring.one, self.ring)
        base = self
        while e:
            if e & 1:
                result = result * base
            base_needed = e > 1
            e >>= 1
            if base_needed and e:
                base = base * base
        return result

    def __eq__(self, other):
        if not isinstance(other, SparsePoly):
            if not self.terms and other == 0:
                return True
            const = self.terms.get((0,) * self.space.nvars)
            return len(self.terms) == 1 and const == self.ring.coerce(other)
        return (
            self.space == other.space
            and self.ring == other.ring
            and self.terms == other.terms
        )

    # -- calculus ------------------------------------------------------------

    def partial_derivative(self, index: int) -> "SparsePoly":
        """Formal partial derivative with respect to the index-th variable."""
        if not 0 <= index < self.space.nvars:
            raise ValueError(f"variable index {index} out of range")
        ring = self.ring
        out = {}
        for exps, c in self.terms.items():
            e = exps[index]
            if e == 0:
                continue
            d = ring.mul(c, ring.coerce(e))
            if d == ring.zero:
                continue
            lowered = exps[:index] + (e - 1,) + exps[index + 1 :]
            prev = out.get(lowered)
            out[lowered] = d if prev is None else ring.add(prev, d)
        out = {e: c for e, c in out.items() if c != ring.zero}
        return SparsePoly(self.space, ring, out, _clean=True)

    # -- evaluation ----------------------------------------------------------

    def evaluate(self, point):
        """Value of the polynomial at a point (one ring element per variable).

        Builds a per-variable power table sized by the largest exponent, so
        evaluating a polynomial with many terms costs one multiplication per
        (term, variable) rather than repeated exponentiations.
        """
        if len(point) != self.space.nvars:
            raise ValueError(
                f"point has {len(point)} coordinates, expected {self.space.nvars}"
            )
        ring = self.ring
        if not self.terms:
            return ring.zero
        maxe = self.max_exponents()
        tables = []
        for x, m in zip(point, maxe):
            x = ring.coerce(x)
            row = [ring.one]
            for _ in range(m):
                row.append(ring.mul(row[-1], x))
            tables.append(row)
        total = ring.zero
        mul, add = ring.mul, ring.add
        for exps, c in self.terms.items():
            v = c
            for i, e in enumerate(exps):
                if e:
                    v = mul(v, tables[i][e])
            total = add(total, v)
        return total

    # -- ring / space conversions ---------------------------------------------

    def map_to(self, ring) -> "SparsePoly":
        """Re-coerce all coefficients into another ring (e.g. QQ -> GF(p))."""
        out = {}
        for exps, c in self.terms.items():
            v = ring.coerce(c)
            if v != ring.zero:
                out[exps] = v
        return SparsePoly(self.space, ring, out, _clean=True)

    def embed(self, target: VarSpace) -> "SparsePoly":
        """Reinterpret the polynomial in a larger variable space.

        Variables are matched by name (x1 and the order-0 derivative slot
        share the name "x1" on purpose).
        """
        if target == self.space:
            return self
        try:
            index_map = [target.names.index(name) for name in self.space.names]
        except ValueError as exc:
            raise ValueError(f"cannot embed {self.space.names} into {target.names}") from exc
        nvars = target.nvars
        out = {}
        for exps, c in self.terms.items():
            new = [0] * nvars
            for src, dst in enumerate(index_map):
                new[dst] = exps[src]
            out[tuple(new)] = c
        return SparsePoly(target, self.ring, out, _clean=True)

    # -- normalization ---------------------------------------------------------

    def normalize_canonical(self) -> "SparsePoly":
        """Scale to coprime integer coefficients with positive leading one.

        This is the canonical representative of the scalar-multiple class:
        multiply by the lcm of the denominators, divide by the gcd of the
        numerators, and flip the sign so the graded-lex leading coefficient
        is positive.  Idempotent.
        """
        if self.ring != QQ:
            raise ValueError("canonical normalization is defined over the rationals")
        if not self.terms:
            raise ValueError("cannot normalize the zero polynomial")
        import math

        lcm_den = 1
        gcd_num = 0
        for c in self.terms.values():
            lcm_den = lcm_den * c.denominator // math.gcd(lcm_den, c.denominator)
            gcd_num = math.gcd(gcd_num, abs(c.numerator))
        scale = Fraction(lcm_den, gcd_num)
        if self.leading_coefficient() < 0:
            scale = -scale
        return self.scale(scale)

    # -- division ---------------------------------------------------------------

    def exact_divide(self, g: "SparsePoly"):
        """Quotient q with self = q*g, or None when g does not divide self.

        Multivariate division by the single divisor g under the graded-lex
        order; any leading term not divisible by g's leading term would end
        up in a nonzero remainder, so the division is abandoned there.
        """
        self._check_compatible(g)
        if g.is_zero:
            raise ValueError("division by the zero polynomial")
        ring = self.ring
        lm_g, lc_g = g.leading_term()
        q = {}
        r = self
        while r.terms:
            lm_r, lc_r = r.leading_term()
            diff = tuple(a - b for a, b in zip(lm_r, lm_g))
            if any(d < 0 for d in diff):
                return None
            c = ring.div(lc_r, lc_g)
            q[diff] = ring.add(q.get(diff, ring.zero), c)
            r = r - SparsePoly(self.space, ring, {diff: c}, _clean=True) * g
        q = {e: c for e, c in q.items() if c != ring.zero}
        return SparsePoly(self.space, ring, q, _clean=True)

    # -- text -----------------------------------------------------------------

    def render(self) -> str:
        """Human-readable form, e.g. ``x1^2*x2 + 3*x1 - 1/2``."""
        if not self.terms:
            return "0"
        names = self.space.names
        chunks = []

        def varpow(i, e):
            name = names[i]
            if e == 1:
                return name
            if "'" in name or "(" in name:
                return f"({name})^{e}"
            return f"{name}^{e}"

        for exps, c in self.sorted_terms(reverse=True):
            mono = "*".join(varpow(i, e) for i, e in enumerate(exps) if e)
            if isinstance(c, Fraction):
                neg = c < 0
                mag = -c if neg else c
            else:  # prime-field coefficient: always printed as stored
                neg = False
                mag = c
            if not mono:
                body = str(mag)
            elif mag == 1:
                body = mono
            else:
                body = f"{mag}*{mono}"
            chunks.append(("-" if neg else "+", body))
        sign, body = chunks[0]
        text = body if sign == "+" else f"-{body}"
        for sign, body in chunks[1:]:
            text += f" {sign} {body}"
        return text

    def __str__(self):
        return self.render()

    def __repr__(self):
        return f"SparsePoly({self.render()!r})"


# ---------------------------------------------------------------------------
# parsing


_TOKEN_RE = re.compile(
    r"(?P<num>\d+(?:\.\d+)?)|(?P<var>x\d+)|(?P<quotes>'+)|(?P<op>[-+*^()/=])|(?P<bad>\S)"
)


class _Token:
    __slots__ = ("kind", "text", "line", "col")

    def __init__(self, kind, text, line, col):
        self.kind = kind
        self.text = text
        self.line = line
        self.col = col


def _tokenize(text):
    tokens = []
    for lineno, line in enumerate(text.splitlines() or [""], start=1):
        stripped = line.split("#", 1)[0]
        for m in _TOKEN_RE.finditer(stripped):
            kind = m.lastgroup
            if kind == "bad":
                raise ParseError(f"unexpected character {m.group()!r}", lineno, m.start() + 1)
            tokens.append(_Token(kind, m.group(), lineno, m.start() + 1))
    return tokens


class _ExprParser:
    """Recursive-descent parser for polynomial expressions.

    The grammar accepts integers, decimals, rational literals ``a/b``,
    ``+ - * ^``, parentheses and variables.  In the derivative and mixed
    regimes x1 may carry derivative markers: ``x1'``, ``x1''`` or
    ``x1^(k)``; a power applied to a derivative variable follows the
    marker, as in ``x1^(3)^2``.  In the state regime ``^`` is always an
    exponent and derivative markers are rejected.  Division is permitted
    only between numeric literals.
    """

    def __init__(self, tokens, space):
        self.tokens = tokens
        self.pos = 0
        self.space = space

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def next(self):
        tok = self.peek()
        if tok is not None:
            self.pos += 1
        return tok

    def error(self, message, tok=None):
        tok = tok or (self.tokens[-1] if self.tokens else None)
        if tok is None:
            raise ParseError(message)
        raise ParseError(message, tok.line, tok.col)

    def expect_op(self, text):
        tok = self.next()
        if tok is None or tok.kind != "op" or tok.text != text:
            self.error(f"expected {text!r}", tok)
        return tok

    # grammar ---------------------------------------------------------------

    def parse(self):
        value = self.expr()
        tok = self.peek()
        if tok is not None:
            self.error(f"unexpected {tok.text!r}", tok)
        return value

    def expr(self):
        tok = self.peek()
        negate = False
        if tok is not None and tok.kind == "op" and tok.text in "+-":
            self.next()
            negate = tok.text == "-"
        value = self.term()
        if negate:
            value = -value
        while True:
            tok = self.peek()
            if tok is None or tok.kind != "op" or tok.text not in "+-":
                break
            self.next()
            rhs = self.term()
            value = value - rhs if tok.text == "-" else value + rhs
        return value

    def term(self):
        value = self.factor()
        while True:
            tok = self.peek()
            if tok is None or tok.kind != "op" or tok.text != "*":
                break
            self.next()
            value = value * self.factor()
        return value

    def factor(self):
        tok = self.peek()
        if tok is not None and tok.kind == "op" and tok.text in "+-":
            self.next()
            inner = self.factor()
            return -inner if tok.text == "-" else inner
        return self.primary()

    def exponent(self):
        """An integer exponent, optionally parenthesized."""
        tok = self.next()
        if tok is not None and tok.kind == "op" and tok.text == "(":
            inner = self.next()
            if inner is None or inner.kind != "num" or "." in inner.text:
                self.error("expected an integer exponent", inner)
            self.expect_op(")")
            return int(inner.text)
        if tok is None or tok.kind != "num" or "." in tok.text:
            self.error("expected an integer exponent", tok)
        return int(tok.text)

    def primary(self):
        tok = self.next()
        if tok is None:
            self.error("unexpected end of expression")
        if tok.kind == "num":
            value = Fraction(tok.text)
            nxt = self.peek()
            if nxt is not None and nxt.kind == "op" and nxt.text == "/":
                self.next()
                den_tok = self.next()
                if den_tok is None or den_tok.kind != "num":
                    self.error("expected a number after '/'", den_tok)
                den = Fraction(den_tok.text)
                if den == 0:
                    self.error("zero denominator", den_tok)
                value /= den
            poly = SparsePoly.constant(self.space, value, QQ)
            return self.maybe_power(poly)
        if tok.kind == "var":
            return self.maybe_power(self.variable(tok))
        if tok.kind == "op" and tok.text == "(":
            value = self.expr()
            self.expect_op(")")
            return self.maybe_power(value)
        if tok.kind == "op" and tok.text == "/":
            self.error("division is only allowed between numeric literals", tok)
        self.error(f"unexpected {tok.text!r}", tok)

    def maybe_power(self, value):
        tok = self.peek()
        if tok is not None and tok.kind == "op" and tok.text == "^":
            self.next()
            e = self.exponent()
            value = value**e
        return value

    def variable(self, tok):
        index = int(tok.text[1:])
        space = self.space
        if index < 1:
            self.error(f"unknown variable {tok.text!r}", tok)
        order = 0
        nxt = self.peek()
        if nxt is not None and nxt.kind == "quotes":
            self.next()
            order = len(nxt.text)
        elif (
            space.kind != "state"
            and nxt is not None
            and nxt.kind == "op"
            and nxt.text == "^"
            and self.pos + 1 < len(self.tokens)
            and self.tokens[self.pos + 1].kind == "op"
            and self.tokens[self.pos + 1].text == "("
        ):
            # x1^(k): parenthesized superscript = derivative marker
            self.next()
            order = self.exponent()
        if order > 0:
            if space.kind == "state":
                self.error("derivatives are not allowed here", nxt)
            if index != 1:
                self.error("only x1 carries derivative markers", tok)
            try:
                slot = space.deriv_index(order)
            except ValueError:
                self.error(f"derivative order {order} exceeds this space", tok)
            return SparsePoly.variable(space, slot, QQ)
        try:
            slot = space.state_index(index)
        except ValueError:
            self.error(f"unknown variable {tok.text!r}", tok)
        return SparsePoly.variable(space, slot, QQ)


def parse_polynomial(text: str, space: VarSpace) -> SparsePoly:
    """Parse an expression into the given variable space (rational coefficients)."""
    tokens = _tokenize(text)
    if not tokens:
        raise ParseError("empty expression")
    return _ExprParser(tokens, space).parse()


def parse_state_poly(text: str, n: int) -> SparsePoly:
    """Parse an expression in the state variables x1 .. xn."""
    return parse_polynomial(text, VarSpace.state(n))


def parse_derivative_poly(text: str, order: int | None = None) -> SparsePoly:
    """Parse an expression in x1 and its derivatives.

    When ``order`` is None the space is inferred from the highest
    derivative marker appearing in the text.
    """
    tokens = _tokenize(text)
    if not tokens:
        raise ParseError("empty expression")
    if order is None:
        order = 0
        for i, tok in enumerate(tokens):
            if tok.kind == "quotes":
                order = max(order, len(tok.text))
            elif (
                tok.kind == "op"
                and tok.text == "^"
                and i > 0
                and tokens[i - 1].kind == "var"
                and i + 2 < len(tokens)
                and tokens[i + 1].kind == "op"
                and tokens[i + 1].text == "("
                and tokens[i + 2].kind == "num"
            ):
                order = max(order, int(tokens[i + 2].text))
    return _ExprParser(tokens, VarSpace.deriv(order)).parse()
