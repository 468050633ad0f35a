"""Polynomial dynamical systems x' = g(x) and the operators acting on them.

The three operators around which everything else is built:

* the Lie derivative      L(f)  = sum_i g_i * df/dx_i,
* the prolonged operator  L*(F) = sum_{i>=2} g_i * dF/dx_i
                                  + sum_{k>=0} x1^(k+1) * dF/dx1^(k),
* the reduction map       R(x1^(k)) = L^k(x1),

together with Monte-Carlo detection of the minimal differential order and
truncated power-series ("jet") evaluation of trajectories over a prime
field.  R is the bridge between differential polynomials in x1 and plain
polynomials on phase space: F vanishes along every trajectory of the
system exactly when R(F) = 0.
"""

from __future__ import annotations

from .arith import BadPrimeError, PrimeField, fork_rng, random_prime
from .errors import BudgetExceededError, ParseError
from .poly import GF, QQ, SparsePoly, VarSpace, _ExprParser, _tokenize


class OdeSystem:
    """An autonomous system x_i' = g_i(x1..xn) with polynomial right-hand sides.

    The right-hand sides are state-regime polynomials over a common
    coefficient ring (exact rationals, or a prime field for modular runs).
    Two degrees drive all support bounds downstream and are cached here:
    ``d`` is the total degree of g_1 and ``D`` the maximum degree among
    g_2..g_n (zero when n = 1, where it plays no role).
    """

    __slots__ = ("n", "g", "ring", "space", "d", "D")

    def __init__(self, g):
        g = list(g)
        if not g:
            raise ValueError("a system needs at least one equation")
        n = len(g)
        space = VarSpace.state(n)
        ring = g[0].ring
        for i, q in enumerate(g):
            if not isinstance(q, SparsePoly) or q.space != space:
                raise ValueError(
                    f"right-hand side {i + 1} must be a polynomial in x1..x{n}"
                )
            if q.ring != ring:
                raise ValueError("right-hand sides must share one coefficient ring")
        self.n = n
        self.g = tuple(g)
        self.ring = ring
        self.space = space
        self.d = max(g[0].total_degree(), 0)
        self.D = 0 if n == 1 else max(max(q.total_degree(), 0) for q in g[1:])

    def reduce_mod(self, p) -> "OdeSystem":
        """The same system with coefficients reduced into GF(p)."""
        ring = p if isinstance(p, GF) else GF(p)
        return OdeSystem([q.map_to(ring) for q in self.g])

    def render(self) -> str:
        return "\n".join(f"x{i + 1}' = {q}" for i, q in enumerate(self.g))

    def __str__(self):
        return self.render()

    def __repr__(self):
        return f"OdeSystem(n={self.n}, d={self.d}, D={self.D})"

    def __eq__(self, other):
        return isinstance(other, OdeSystem) and self.g == other.g


def parse_system(text: str) -> OdeSystem:
    """Parse a system description: one ``xk' = <polynomial>`` line per variable.

    Blank lines and ``#`` comments are ignored.  The dimension n is the
    number of equations; the left-hand sides must cover x1..xn exactly
    once each, and right-hand sides may only mention x1..xn (derivatives
    are rejected).  Decimal literals become exact rationals.
    """
    tokens = _tokenize(text)
    by_line: dict[int, list] = {}
    for tok in tokens:
        by_line.setdefault(tok.line, []).append(tok)

    equations = {}
    for lineno in sorted(by_line):
        toks = by_line[lineno]
        head = toks[0]
        if head.kind != "var":
            raise ParseError("expected an equation like x1' = ...", head.line, head.col)
        index = int(head.text[1:])
        if len(toks) < 2 or toks[1].kind != "quotes" or toks[1].text != "'":
            raise ParseError(
                "left-hand side must be a first derivative like x1'", head.line, head.col
            )
        if len(toks) < 3 or toks[2].kind != "op" or toks[2].text != "=":
            raise ParseError("expected '=' after the left-hand side", head.line, head.col)
        if index in equations:
            raise ParseError(f"duplicate equation for x{index}", head.line, head.col)
        rhs = toks[3:]
        if not rhs:
            raise ParseError("empty right-hand side", toks[2].line, toks[2].col)
        equations[index] = rhs

    if not equations:
        raise ParseError("no equations found")
    n = len(equations)
    if sorted(equations) != list(range(1, n + 1)):
        got = ", ".join(f"x{k}" for k in sorted(equations))
        raise ParseError(
            f"the {n} equations must define x1..x{n} exactly once each (got {got})"
        )
    space = VarSpace.state(n)
    return OdeSystem([_ExprParser(equations[k], space).parse() for k in range(1, n + 1)])


# ---------------------------------------------------------------------------
# operators


def lie_derivative(sys: OdeSystem, f: SparsePoly) -> SparsePoly:
    """Derivative of f along the flow: sum_i g_i * df/dx_i."""
    if f.space != sys.space:
        raise ValueError("f must be a state-regime polynomial of the same system")
    out = SparsePoly.zero(sys.space, sys.ring)
    for i, gi in enumerate(sys.g):
        pd = f.partial_derivative(i)
        if pd.terms:
            out = out + gi * pd
    return out


def lie_iterates(sys: OdeSystem, count: int) -> list[SparsePoly]:
    """[x1, L(x1), L^2(x1), ..., L^(count-1)(x1)] as state-regime polynomials."""
    if count < 1:
        return []
    out = [SparsePoly.variable(sys.space, 0, sys.ring)]
    for _ in range(count - 1):
        out.append(lie_derivative(sys, out[-1]))
    return out


def lie_star(sys: OdeSystem, f: SparsePoly) -> SparsePoly:
    """The prolonged operator on polynomials in x1-derivatives and x2..xn.

    Each x1^(k) is pushed to x1^(k+1) by the chain rule and the remaining
    state variables move along the flow; x1 itself is NOT rewritten in
    terms of the right-hand sides, so the output lives one derivative
    order higher than the input.
    """
    space = f.space
    if space.kind == "state":
        raise ValueError("f must be in the derivative or mixed regime")
    if space.kind == "mixed" and space.n != sys.n:
        raise ValueError(f"f mentions {space.n} state variables, system has {sys.n}")
    order = space.order
    if space.kind == "deriv":
        out_space = VarSpace.deriv(order + 1)
    else:
        out_space = VarSpace.mixed(order + 1, sys.n)
    F = f.embed(out_space)
    out = SparsePoly.zero(out_space, f.ring)
    if space.kind == "mixed":
        for i in range(2, sys.n + 1):
            pd = F.partial_derivative(out_space.state_index(i))
            if pd.terms:
                out = out + sys.g[i - 1].embed(out_space) * pd
    for k in range(order + 1):
        pd = F.partial_derivative(out_space.deriv_index(k))
        if pd.terms:
            out = out + SparsePoly.variable(out_space, out_space.deriv_index(k + 1), f.ring) * pd
    return out


def reduction(sys: OdeSystem, f: SparsePoly, max_terms: int | None = None) -> SparsePoly:
    """Substitute x1^(k) -> L^k(x1) into a differential polynomial.

    The substitution goes highest derivative first, Horner-style in each
    derivative variable, which keeps intermediate expression swell down
    compared to expanding monomials independently.  ``max_terms`` caps the
    size of any intermediate polynomial; exceeding it raises
    BudgetExceededError rather than silently eating memory.
    """
    if f.space.kind != "deriv":
        raise ValueError("f must be a polynomial in x1 and its derivatives")
    if f.ring != sys.ring:
        raise ValueError(f"coefficient-ring mismatch: {f.ring} vs {sys.ring}")
    ring = sys.ring
    state = sys.space
    zero = SparsePoly.zero(state, ring)
    if not f.terms:
        return zero
    iterates = lie_iterates(sys, f.space.order + 1)

    def guard(poly):
        if max_terms is not None and len(poly.terms) > max_terms:
            raise BudgetExceededError(
                f"intermediate polynomial reached {len(poly.terms)} terms "
                f"(budget {max_terms}); the membership test is indeterminate "
                f"at this budget"
            )
        return poly

    def descend(terms, k):
        # terms: exponent tuples of length k+1 (variables x1^(0..k))
        if k == 0:
            pad = (0,) * (state.nvars - 1)
            return SparsePoly(
                state, ring, {(e[0],) + pad: c for e, c in terms.items()}, _clean=True
            )
        strata: dict[int, dict] = {}
        for exps, c in terms.items():
            strata.setdefault(exps[-1], {})[exps[:-1]] = c
        h = iterates[k]
        val = zero
        for j in range(max(strata), -1, -1):
            if val.terms:
                val = guard(val * h)
            if j in strata:
                val = guard(val + descend(strata[j], k - 1))
        return val

    return descend(f.terms, f.space.order)


def order_nu(sys: OdeSystem, reps: int = 3, rng=None) -> int:
    """Minimal differential order of x1, detected by Monte-Carlo rank.

    The order equals the rank of the n x n Jacobian of (x1, L(x1), ...,
    L^(n-1)(x1)) with respect to x1..xn.  The rank is taken at random
    points over random 62-bit primes, keeping the maximum over ``reps``
    repetitions; a random evaluation can only underestimate the generic
    rank, and an underestimate surfaces later as an empty interpolation
    kernel, which triggers escalation.
    """
    if sys.ring != QQ:
        raise ValueError("order detection expects an exact-rational system")
    if rng is None:
        rng = fork_rng(2026, "order-nu")
    n = sys.n
    rows = lie_iterates(sys, n)
    jac = [[rows[i].partial_derivative(j) for j in range(n)] for i in range(n)]
    best = 0
    for _ in range(reps):
        p = random_prime(62, rng)
        field = GF(p)
        point = [rng.randrange(p) for _ in range(n)]
        matrix = [[entry.map_to(field).evaluate(point) for entry in row] for row in jac]
        best = max(best, _rank_mod_p(matrix, p))
        if best == n:
            break
    return best


def _rank_mod_p(matrix, p: int) -> int:
    """Rank of a small dense integer matrix over GF(p)."""
    m = [row[:] for row in matrix]
    rows = len(m)
    cols = len(m[0]) if rows else 0
    rank = 0
    for c in range(cols):
        pivot = next((r for r in range(rank, rows) if m[r][c] % p), None)
        if pivot is None:
            continue
        m[rank], m[pivot] = m[pivot], m[rank]
        inv = pow(m[rank][c], p - 2, p)
        m[rank] = [v * inv % p for v in m[rank]]
        for r in range(rows):
            if r != rank and m[r][c] % p:
                factor = m[r][c] % p
                m[r] = [(a - factor * b) % p for a, b in zip(m[r], m[rank])]
        rank += 1
        if rank == rows:
            break
    return rank


# ---------------------------------------------------------------------------
# jets


def jet(sys: OdeSystem, base, nu: int) -> list[int]:
    """Jet (j_0, ..., j_nu) of x1 along the trajectory through ``base``.

    The system must already be reduced mod p.  The trajectory is computed
    as a truncated power series by the coefficient recurrence — knowing
    x(t) mod t^k, the relation x' = g(x) yields the t^k coefficient — and
    j_k = k! * [t^k] x1(t), which equals R(x1^(k)) evaluated at the base
    point without ever expanding R symbolically.
    """
    if not isinstance(sys.ring, GF):
        raise ValueError("jets are computed modulo a prime; reduce the system first")
    p = sys.ring.p
    if p <= nu:
        raise BadPrimeError(f"prime {p} must exceed the jet order {nu}")
    if nu < 0:
        raise ValueError("jet order must be nonnegative")
    n = sys.n
    series = [[sys.ring.coerce(b)] for b in base]
    if len(series) != n:
        raise ValueError(f"base point has {len(series)} coordinates, expected {n}")
    for k in range(nu):
        length = k + 1
        tables = _series_power_tables(sys, series, length, p)
        for i in range(n):
            coeff = _series_eval_coeff(sys.g[i], tables, length, p)
            series[i].append(coeff * pow(k + 1, p - 2, p) % p)
    out = []
    fact = 1
    for k in range(nu + 1):
        if k:
            fact = fact * k % p
        out.append(series[0][k] * fact % p)
    return out


def _series_power_tables(sys, series, length, p):
    """Per-variable truncated powers of the current series, mod t^length."""
    maxe = [0] * sys.n
    for q in sys.g:
        for i, e in enumerate(q.max_exponents()):
            if e > maxe[i]:
                maxe[i] = e
    tables = []
    one = [1] + [0] * (length - 1)
    for i in range(sys.n):
        row = [one]
        cur = series[i][:length] + [0] * (length - len(series[i]))
        for _ in range(maxe[i]):
            row.append(_series_mul(row[-1], cur, length, p))
        tables.append(row)
    return tables


def _series_mul(a, b, length, p):
    out = [0] * length
    for i, ai in enumerate(a):
        if ai:
            for j in range(min(len(b), length - i)):
                if b[j]:
                    out[i + j] = (out[i + j] + ai * b[j]) % p
    return out


def _series_eval_coeff(poly, tables, length, p):
    """Coefficient of t^(length-1) in poly evaluated at the tabled series."""
    total = 0
    for exps, c in poly.terms.items():
        term = [c % p] + [0] * (length - 1)
        for i, e in enumerate(exps):
            if e:
                term = _series_mul(term, tables[i][e], length, p)
        total = (total + term[length - 1]) % p
    return total
