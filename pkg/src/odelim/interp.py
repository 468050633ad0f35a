"""Evaluation–interpolation engine for minimal differential polynomials.

The pipeline, per prime p:

1. sample integer points in [-R, R]^n (distinct, deterministic per seed);
2. run the truncated power-series recurrence at all points simultaneously
   to get the jet (x1, x1', ..., x1^(nu)) of every trajectory mod p;
3. evaluate every admissible monomial at every jet -> evaluation matrix N;
4. eliminate left-to-right in graded-lex column order; the first pivotless
   column is the leading monomial of the minimal relation and its kernel
   vector is the relation itself mod p (degree filtration: a nontrivial
   kernel appears first in the lowest total-degree stratum, and there it
   must be one-dimensional).

Across primes, coefficient vectors are pinned to pivot = 1 at the shared
leading monomial, combined by CRT and rationally reconstructed; the run
stops when two consecutive reconstructions agree and a fresh-prime jet
probe confirms the result.  The support is shrunk to the exact support
observed at the first prime, so later primes solve a much smaller system
whenever the theoretical bound is slack.

Self-correction: an empty kernel means the assumed differential order is
too small (escalate), a persistently 2-dimensional first stratum means it
is too large (lower it), and an empty kernel on the shrunk support means
the first prime lied about the support (restart with a two-prime
consensus).
"""

from __future__ import annotations

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from fractions import Fraction

import numpy as np

from .arith import (
    CrtAccumulator,
    crt_absorb,
    fork_rng,
    random_prime,
    rational_reconstruct,
)
from .errors import BadPrimeError, ComputationError, KernelAnomalyError
from .ode import OdeSystem, order_nu
from .poly import GF, QQ, SparsePoly, VarSpace
from .support import LatticeSet, bound_inequalities, enumerate_lattice, scalar_bound

log = logging.getLogger("odelim.interp")

# primes up to this size use int64 rows with delayed reduction; larger
# primes fall back to exact big-integer (object dtype) arithmetic
_INT64_PRIME_BITS = 30
_POINT_RETRIES = 3       # point redraws per prime before giving up on it
_ANOMALY_PRIMES = 2      # anomalous primes in a row before doubting the order
_FIRST_PHASE_TRIES = 4   # full-support primes tried before declaring anomaly
_RESTART_TRIES = 8       # primes allowed while seeking a support consensus
_PROBE_TRIES = 4         # probe primes skipped due to denominator collisions


def _default_threads() -> int:
    raw = os.environ.get("ODELIM_THREADS", "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


@dataclass(frozen=True)
class SampleConfig:
    """Tunables for the interpolation pipeline.

    radius is the half-width of the integer sampling box; seed drives every
    random choice (points, primes, probes) through labeled forks, so equal
    seeds give equal runs; nu_override skips order detection.
    """

    radius: int = 1893
    seed: int = 0
    prime_bits: int = 25
    max_primes: int = 200
    nu_override: int | None = None
    extra_rows: int = 8
    probe_points: int = 32
    threads: int = 0  # 0 = take ODELIM_THREADS, default 1

    def __post_init__(self):
        if self.radius < 1:
            raise ValueError("sampling radius must be at least 1")
        if not 16 <= self.prime_bits <= 62:
            raise ValueError("prime_bits must lie in [16, 62]")
        if self.max_primes < 1:
            raise ValueError("max_primes must be positive")

    @property
    def effective_threads(self) -> int:
        return self.threads if self.threads >= 1 else _default_threads()


@dataclass(frozen=True)
class Verification:
    """How strongly the result has been checked."""

    kind: str = "unverified"  # unverified | probabilistic | exact
    trials: int | None = None
    failure_bound: Fraction | None = None


@dataclass(frozen=True)
class EliminationResult:
    f_min: SparsePoly
    nu: int
    primes_used: tuple
    support_size: int
    verified: Verification = Verification()


@dataclass(frozen=True)
class EvalMatrix:
    """Rows = sample points, columns = monomials (ascending graded-lex)."""

    data: np.ndarray
    p: int

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]


# ---------------------------------------------------------------------------
# sampling


def sample_points(config: SampleConfig, count: int, n: int):
    """``count`` distinct points of [-radius, radius]^n, seed-deterministic."""
    rng = fork_rng(config.seed, "points")
    return _draw_points(rng, count, n, config.radius)


def _draw_points(rng, count: int, n: int, radius: int):
    span = 2 * radius + 1
    if span**n < count:
        raise ComputationError(
            f"cannot place {count} distinct points in a box of {span ** n}; "
            f"increase the sampling radius"
        )
    seen = set()
    out = []
    rounds = 0
    while len(out) < count:
        pt = tuple(rng.randint(-radius, radius) for _ in range(n))
        if pt in seen:
            rounds += 1
            if rounds > 200 * count:
                raise ComputationError(
                    "sampling keeps colliding; increase the sampling radius"
                )
            continue
        seen.add(pt)
        out.append(pt)
    return out


# ---------------------------------------------------------------------------
# batch jets and matrix assembly


def _dtype_for(p: int):
    return np.int64 if p < (1 << _INT64_PRIME_BITS) else object


def _series_mul_arrays(a, b, length, p):
    """Truncated product of two series whose coefficients are point-arrays."""
    out = []
    for l in range(length):
        acc = None
        for i in range(l + 1):
            if i >= len(a) or l - i >= len(b):
                continue
            prod = a[i] * b[l - i] % p
            acc = prod if acc is None else (acc + prod) % p
        if acc is None:
            acc = np.zeros_like(a[0])
        out.append(acc)
    return out


def _batch_jets(sys_p: OdeSystem, pts: np.ndarray, nu: int, p: int):
    """Jets j_0..j_nu of x1 at every sample point at once.

    pts is an (m, n) array already reduced mod p.  Returns a list of nu+1
    arrays of length m.  Same recurrence as ode.jet, vectorized over the
    point index.
    """
    m, n = pts.shape
    dtype = _dtype_for(p)
    if dtype is object:
        pts = np.array([[int(v) for v in row] for row in pts], dtype=object)
    series = [[pts[:, i].astype(dtype, copy=True)] for i in range(n)]
    maxe = [0] * n
    for q in sys_p.g:
        for i, e in enumerate(q.max_exponents()):
            maxe[i] = max(maxe[i], e)
    one = np.ones(m, dtype=dtype) if dtype is not object else np.array([1] * m, dtype=object)
    zero = np.zeros(m, dtype=dtype) if dtype is not object else np.array([0] * m, dtype=object)

    for k in range(nu):
        length = k + 1
        unit = [one] + [zero] * (length - 1)
        tables = []
        for i in range(n):
            cur = series[i][:length]
            pows = [unit]
            for _ in range(maxe[i]):
                pows.append(_series_mul_arrays(pows[-1], cur, length, p))
            tables.append(pows)
        inv_step = pow(k + 1, p - 2, p)
        for i in range(n):
            acc = zero.copy()
            for exps, c in sys_p.g[i].terms.items():
                term = None
                for v, e in enumerate(exps):
                    if e:
                        term = (
                            tables[v][e]
                            if term is None
                            else _series_mul_arrays(term, tables[v][e], length, p)
                        )
                if term is None:  # constant term: only contributes at t^0
                    tail = one if length == 1 else zero
                else:
                    tail = term[length - 1]
                acc = (acc + c * tail) % p
            series[i].append(acc * inv_step % p)

    jets = []
    fact = 1
    for k in range(nu + 1):
        if k:
            fact = fact * k % p
        jets.append(series[0][k] * fact % p)
    return jets


def _eval_matrix(sys_p: OdeSystem, S: LatticeSet, points) -> EvalMatrix:
    p = sys_p.ring.p
    dtype = _dtype_for(p)
    pts = np.array(points, dtype=np.int64 if dtype is not object else object)
    pts = pts % p
    m = pts.shape[0]
    jets = _batch_jets(sys_p, pts, S.nu, p)
    maxe = [0] * (S.nu + 1)
    for e in S.points:
        for k, ek in enumerate(e):
            maxe[k] = max(maxe[k], ek)
    one = np.ones(m, dtype=dtype) if dtype is not object else np.array([1] * m, dtype=object)
    pow_tables = []
    for k in range(S.nu + 1):
        row = [one]
        for _ in range(maxe[k]):
            row.append(row[-1] * jets[k] % p)
        pow_tables.append(row)
    N = np.empty((m, len(S.points)), dtype=dtype)
    for col, e in enumerate(S.points):
        acc = None
        for k, ek in enumerate(e):
            if ek:
                acc = pow_tables[k][ek] if acc is None else acc * pow_tables[k][ek] % p
        N[:, col] = one if acc is None else acc
    return EvalMatrix(N, p)


def assemble(sys_p: OdeSystem, S: LatticeSet, points) -> EvalMatrix:
    """Evaluation matrix N[j][i] = (i-th monomial) at (jet of j-th point)."""
    if not isinstance(sys_p.ring, GF):
        raise ValueError("assemble expects a system reduced modulo a prime")
    if len(points) < len(S.points):
        raise ValueError(
            f"need at least {len(S.points)} points for {len(S.points)} monomials"
        )
    if sys_p.ring.p <= S.nu:
        raise BadPrimeError(f"prime {sys_p.ring.p} must exceed the order {S.nu}")
    return _eval_matrix(sys_p, S, points)


# ---------------------------------------------------------------------------
# modular linear algebra


def _moddot(a, b, p: int) -> int:
    """Exact dot product mod p of 1-d arrays with entries in [0, p)."""
    if len(a) == 0:
        return 0
    if a.dtype == object or b.dtype == object:
        return int(sum(int(x) * int(y) for x, y in zip(a, b)) % p)
    # keep partial sums inside int64: each product is < p^2
    block = max(1, (1 << 62) // ((p - 1) ** 2 + 1))
    if len(a) <= block:
        return int(np.dot(a, b) % p)
    total = 0
    for i in range(0, len(a), block):
        total = (total + int(np.dot(a[i : i + block], b[i : i + block]))) % p
    return total


def _echelon(W: np.ndarray, p: int, degrees=None):
    """In-place left-to-right forward elimination mod p.

    Returns (pivots, free_cols, processed).  Pivot rows end up reduced mod
    p with unit pivots and zeros to their left.  With ``degrees`` given
    (nondecreasing per column), elimination stops after finishing the
    degree stratum that contains the first pivotless column, which is all
    the degree filtration needs.

    For primes below 2^30 the update keeps raw int64 entries and reduces
    the trailing block only every few thousand steps (each step adds at
    most (p-1)^2 in magnitude, so the reduction interval keeps everything
    inside the 2^62 range).
    """
    rows, cols = W.shape
    if W.dtype == object:
        interval = 1
    else:
        interval = max(1, ((1 << 62) - p) // ((p - 1) ** 2))
    pivots = []
    free = []
    stop_degree = None
    rank = 0
    steps = 0
    processed = cols
    for c in range(cols):
        if degrees is not None and free and degrees[c] != stop_degree:
            processed = c
            break
        W[rank:, c] %= p
        nz = np.nonzero(W[rank:, c])[0]
        if nz.size == 0:
            free.append(c)
            if stop_degree is None and degrees is not None:
                stop_degree = degrees[c]
            continue
        r = rank + int(nz[0])
        if r != rank:
            W[[rank, r]] = W[[r, rank]]
        row = W[rank] % p
        inv = pow(int(row[c]), p - 2, p)
        row = row * inv % p
        W[rank] = row
        if rank + 1 < rows:
            factors = W[rank + 1 :, c].copy()
            if np.count_nonzero(factors):
                W[rank + 1 :, c:] -= np.outer(factors, row[c:])
                steps += 1
                if steps >= interval:
                    W[rank + 1 :, c:] %= p
                    steps = 0
        rank += 1
        pivots.append(c)
    return pivots, free, processed


def _kernel_vector(W: np.ndarray, p: int, pivots, free_col: int):
    """Back-substitute the kernel vector with a 1 at ``free_col``.

    Works on the echelon form produced by _echelon; only pivot columns
    left of free_col can be nonzero, so the vector is supported on the
    prefix [0, free_col].
    """
    vec = np.zeros(free_col + 1, dtype=W.dtype)
    vec[free_col] = 1
    for t in reversed(range(len(pivots))):
        j = pivots[t]
        if j >= free_col:
            continue
        s = _moddot(W[t, j + 1 : free_col + 1], vec[j + 1 :], p)
        vec[j] = (-s) % p
    return vec


def nullspace(N: EvalMatrix):
    """Reduced-echelon kernel basis of {c : N.c = 0} over GF(p).

    Each basis vector is normalized so its first nonzero coordinate is 1.
    """
    W = N.data.copy()
    p = N.p
    pivots, free, _ = _echelon(W, p)
    basis = []
    for f in free:
        vec = _kernel_vector(W, p, [j for j in pivots if j < f], f)
        full = np.zeros(N.cols, dtype=W.dtype)
        full[: f + 1] = vec
        nz = np.nonzero(full)[0]
        lead = int(full[nz[0]])
        if lead != 1:
            full = full * pow(lead, p - 2, p) % p
        basis.append(tuple(int(v) for v in full))
    return basis


def minimal_element(N: EvalMatrix, S: LatticeSet):
    """The minimal-total-degree kernel element, or None when the kernel is 0.

    Columns arrive in ascending graded-lex order, so the first pivotless
    column sits in the lowest degree stratum with a nontrivial restricted
    kernel — and it is that stratum's leading monomial, which makes the
    returned vector pivot-normalized (leading coefficient 1) for free.  A
    second pivotless column inside the same stratum means the restricted
    kernel has dimension > 1, which the one-generator structure of the
    truncated relation ideal forbids; that is reported as an anomaly so
    the caller can retry with fresh points or a fresh prime.
    """
    if len(S.points) != N.cols:
        raise ValueError("monomial set does not match the matrix columns")
    W = N.data.copy()
    p = N.p
    degrees = [sum(e) for e in S.points]
    pivots, free, _ = _echelon(W, p, degrees=degrees)
    if not free:
        return None
    if len(free) > 1:
        raise KernelAnomalyError(
            f"{len(free)}-dimensional kernel in the degree-{degrees[free[0]]} "
            f"stratum; expected dimension 1"
        )
    f = free[0]
    vec = _kernel_vector(W, p, pivots, f)
    full = np.zeros(N.cols, dtype=W.dtype)
    full[: f + 1] = vec
    return tuple(int(v) for v in full)


# ---------------------------------------------------------------------------
# per-prime pipeline


def eliminate_mod_p(sys: OdeSystem, p: int, S: LatticeSet, config: SampleConfig):
    """Full single-prime solve on the support-bound lattice S.

    Returns (support, coefficients) — the nonzero monomials of the minimal
    kernel element and their values mod p — or None when the kernel is
    empty (the assumed order is too small).  Retries with fresh points
    when the degree filtration reports an anomalous kernel; a persistent
    anomaly propagates as KernelAnomalyError.
    """
    if p <= S.nu:
        raise BadPrimeError(f"prime {p} must exceed the order {S.nu}")
    sys_p = sys.reduce_mod(p)
    last_anomaly = None
    for attempt in range(_POINT_RETRIES):
        rng = fork_rng(config.seed, "points", str(p), str(attempt))
        points = _draw_points(rng, len(S.points), sys.n, config.radius)
        N = _eval_matrix(sys_p, S, points)
        try:
            vec = minimal_element(N, S)
        except KernelAnomalyError as exc:
            last_anomaly = exc
            log.debug("prime %d attempt %d: %s", p, attempt, exc)
            continue
        if vec is None:
            return None
        support = []
        coeffs = []
        for mono, value in zip(S.points, vec):
            if value:
                support.append(mono)
                coeffs.append(value)
        return tuple(support), tuple(coeffs)
    raise last_anomaly


def _solve_on_support(sys: OdeSystem, p: int, support, nu: int, config: SampleConfig):
    """Shrunk solve: only the known support monomials, a few extra rows.

    Returns the coefficient vector (pivot-normalized at the last support
    monomial), None for an empty kernel (bad first-prime support), or the
    string "badlead" when this prime divides the leading coefficient.
    """
    Sx = LatticeSet(nu, tuple(support))
    sys_p = sys.reduce_mod(p)
    rows = len(support) + config.extra_rows
    last_anomaly = None
    for attempt in range(_POINT_RETRIES):
        rng = fork_rng(config.seed, "shrunk", str(p), str(attempt))
        points = _draw_points(rng, rows, sys.n, config.radius)
        N = _eval_matrix(sys_p, Sx, points)
        try:
            vec = minimal_element(N, Sx)
        except KernelAnomalyError as exc:
            last_anomaly = exc
            log.debug("shrunk solve, prime %d attempt %d: %s", p, attempt, exc)
            continue
        if vec is None:
            return None
        if vec[-1] == 0:
            # the relation exists mod p but its leading coefficient vanished:
            # p divides the true leading coefficient; skip this prime
            return "badlead"
        return vec
    raise last_anomaly


def _probe_membership(sys, nu, support, rationals, config, fresh_prime) -> bool:
    """Check sum_i c_i s_i(jet) = 0 at fresh points over a fresh prime."""
    for _ in range(_PROBE_TRIES):
        p = fresh_prime()
        field = GF(p)
        try:
            coeffs = [field.coerce(q) for q in rationals]
        except BadPrimeError:
            continue  # prime divides a denominator; take another
        sys_p = sys.reduce_mod(p)
        rng = fork_rng(config.seed, "probe", str(p))
        points = _draw_points(rng, config.probe_points, sys.n, config.radius)
        N = _eval_matrix(sys_p, LatticeSet(nu, tuple(support)), points)
        cvec = np.array(coeffs, dtype=N.data.dtype)
        for row in N.data:
            if _moddot(row % p, cvec, p):
                return False
        return True
    return False


# ---------------------------------------------------------------------------
# multi-modular driver


def eliminate(sys: OdeSystem, config: SampleConfig | None = None) -> EliminationResult:
    """Compute the minimal differential polynomial of x1 for the system.

    Runs the per-prime pipeline at the detected (or overridden) order,
    shrinks the support after the first prime, accumulates coefficients by
    CRT, and stops once the rational reconstruction is stable under a new
    prime and survives an independent membership probe.  The result is
    canonical: integer coefficients with content 1 and a positive leading
    coefficient.

    Self-correction across orders: an empty kernel raises the order (the
    true order can only have been underestimated), while a persistently
    anomalous kernel lowers it (a too-large order makes the relation and
    its derivative collide in one degree stratum).
    """
    config = config or SampleConfig()
    if sys.ring != QQ:
        raise ValueError("eliminate expects an exact-rational system")
    if 2 * config.radius >= 1 << config.prime_bits:
        raise ValueError(
            "prime_bits too small for the sampling radius: points must stay "
            "distinct modulo every prime"
        )
    n = sys.n
    if sys.d < 1:
        raise ValueError("the right-hand side of x1 must be nonconstant")
    if n > 1 and sys.D < 1:
        raise ValueError("at least one of the other right-hand sides must be nonconstant")
    if config.nu_override is not None:
        nu = config.nu_override
        if not 1 <= nu <= n:
            raise ValueError(f"order override must lie in 1..{n}")
    else:
        nu = order_nu(sys, rng=fork_rng(config.seed, "order"))
        nu = max(nu, 1)
    emptied = set()
    anomalous = set()
    while True:
        outcome, result = _run_at_order(sys, nu, config)
        if outcome == "ok":
            return result
        if outcome == "empty":
            emptied.add(nu)
            if nu >= n:
                raise ComputationError(
                    f"empty kernel at order {n} (= dimension); this should be "
                    f"impossible for a polynomial system — please report"
                )
            if nu + 1 in anomalous:
                raise KernelAnomalyError(
                    f"order {nu} gives an empty kernel but order {nu + 1} an "
                    f"ambiguous one; the sampling may be degenerate — try "
                    f"another seed or a larger radius"
                )
            log.info("order %d: empty kernel, escalating to %d", nu, nu + 1)
            nu += 1
        else:  # anomaly
            anomalous.add(nu)
            if nu <= 1 or nu - 1 in emptied:
                raise KernelAnomalyError(
                    f"kernel stays multi-dimensional at order {nu} and smaller "
                    f"orders are empty; try another seed or a larger radius"
                )
            log.info(
                "order %d: kernel repeatedly multi-dimensional; the true order "
                "is likely smaller, retrying at %d",
                nu,
                nu - 1,
            )
            nu -= 1


def _run_at_order(sys: OdeSystem, nu: int, config: SampleConfig):
    """One full attempt at a fixed differential order.

    Returns ("ok", EliminationResult) | ("empty", None) | ("anomaly", None).
    """
    n = sys.n
    bound = scalar_bound(sys.d) if n == 1 else bound_inequalities(sys.d, sys.D, nu)
    S = enumerate_lattice(bound)
    log.info("order %d: support bound has %d monomials", nu, len(S.points))

    used_primes = set()
    prime_rng = fork_rng(config.seed, "primes", str(nu))
    min_p = max(nu, 2 * config.radius)

    def fresh_prime() -> int:
        while True:
            p = random_prime(config.prime_bits, prime_rng)
            if p > min_p and p not in used_primes:
                used_primes.add(p)
                return p

    # --- first phase: full-bound solve to discover the support -------------
    support = None
    first = None
    anomalies = 0
    for _ in range(_FIRST_PHASE_TRIES):
        p = fresh_prime()
        try:
            res = eliminate_mod_p(sys, p, S, config)
        except KernelAnomalyError:
            anomalies += 1
            if anomalies >= _ANOMALY_PRIMES:
                return "anomaly", None
            continue
        if res is None:
            return "empty", None
        support, coeffs = res
        first = (p, coeffs)
        break
    if first is None:
        return "anomaly", None
    log.info(
        "order %d: support shrunk from %d to %d monomials (prime %d)",
        nu,
        len(S.points),
        len(support),
        first[0],
    )

    # --- CRT phase on the shrunk support ------------------------------------
    pivot_inv = pow(first[1][-1], first[0] - 2, first[0])
    normalized = tuple(c * pivot_inv % first[0] for c in first[1])
    acc = crt_absorb(CrtAccumulator.empty(len(support)), normalized, first[0])
    primes_used = [first[0]]
    previous = None
    threads = config.effective_threads

    def restart_consensus():
        """First-prime support was wrong: find two primes that agree."""
        seen = {}
        for _ in range(_RESTART_TRIES):
            p = fresh_prime()
            try:
                res = eliminate_mod_p(sys, p, S, config)
            except KernelAnomalyError:
                continue
            if res is None:
                return "empty"
            sup, coeffs = res
            if sup in seen:
                q, qcoeffs = seen[sup]
                log.info(
                    "consensus restart: primes %d and %d agree on %d monomials",
                    q,
                    p,
                    len(sup),
                )
                return sup, [(q, qcoeffs), (p, coeffs)]
            seen[sup] = (p, coeffs)
        raise ComputationError(
            "no two primes agree on the support; the sampling radius or "
            "prime size is likely too small"
        )

    def absorb(vector, p):
        nonlocal acc
        acc = crt_absorb(acc, vector, p)
        primes_used.append(p)

    def reconstruct():
        out = []
        for r in acc.residues:
            q = rational_reconstruct(r, acc.modulus)
            if q is None:
                return None
            out.append(q)
        return out

    def finish(rationals) -> EliminationResult:
        terms = {mono: q for mono, q in zip(support, rationals) if q}
        f = SparsePoly(VarSpace.deriv(nu), QQ, terms).normalize_canonical()
        log.info(
            "stabilized after %d primes; support size %d", len(primes_used), len(f.terms)
        )
        return EliminationResult(
            f_min=f,
            nu=nu,
            primes_used=tuple(primes_used),
            support_size=len(f.terms),
            verified=Verification(),
        )

    pool = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None
    try:
        pending = []
        while len(primes_used) < config.max_primes:
            if pool is not None:
                while len(pending) < threads:
                    pnext = fresh_prime()
                    pending.append(
                        (pnext, pool.submit(_solve_on_support, sys, pnext, support, nu, config))
                    )
                p, fut = pending.pop(0)
                try:
                    solved = fut.result()
                except KernelAnomalyError:
                    solved = "anomaly"
            else:
                p = fresh_prime()
                try:
                    solved = _solve_on_support(sys, p, support, nu, config)
                except KernelAnomalyError:
                    solved = "anomaly"

            if solved is None:
                log.warning("prime %d: empty kernel on shrunk support, restarting", p)
                outcome = restart_consensus()
                if outcome == "empty":
                    return "empty", None
                support, entries = outcome
                acc = CrtAccumulator.empty(len(support))
                primes_used = []
                previous = None
                for q, coeffs in entries:
                    inv = pow(coeffs[-1], q - 2, q)
                    absorb(tuple(c * inv % q for c in coeffs), q)
                pending = []
                continue
            if solved == "badlead":
                log.info("prime %d divides the leading coefficient, skipped", p)
                continue
            if solved == "anomaly":
                log.warning("prime %d: anomalous shrunk kernel, skipped", p)
                continue

            absorb(solved, p)
            current = reconstruct()
            log.debug(
                "prime %d absorbed (%d primes, reconstruction %s)",
                p,
                len(primes_used),
                "ok" if current is not None else "pending",
            )
            if current is not None and current == previous:
                if _probe_membership(sys, nu, support, current, config, fresh_prime):
                    return "ok", finish(current)
                log.warning("membership probe failed; continuing with more primes")
            previous = current
        raise ComputationError(
            f"no stable reconstruction after {config.max_primes} primes; "
            f"increase max_primes or prime_bits"
        )
    finally:
        if pool is not None:
            pool.shutdown(wait=False, cancel_futures=True)
