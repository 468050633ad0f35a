"""Membership checking and the certified elimination driver.

A differential polynomial F vanishes along every trajectory of x' = g(x)
exactly when substituting x1^(k) -> L^k(x1) collapses it to zero.  Two
checkers implement that criterion: a probabilistic one (evaluate at jets
of random points over random primes, with an explicit Schwartz–Zippel
failure bound) and an exact one (full symbolic substitution over the
rationals, with a hard term budget).  The certified driver wraps the
interpolation pipeline: run it, exact-check the candidate, and double the
sampling radius until the check passes.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction

from .arith import fork_rng, random_prime
from .errors import BadPrimeError, VerificationError
from .interp import EliminationResult, SampleConfig, Verification, eliminate
from .ode import OdeSystem, jet, lie_iterates, reduction
from .poly import GF, SparsePoly

CHECK_TERM_BUDGET = 500_000


@dataclass(frozen=True)
class VerificationReport:
    mode: str  # "probabilistic" | "exact"
    trials: int
    failure_bound: Fraction
    outcome: bool


def _degree_growth(sys: OdeSystem, nu: int) -> int:
    """Max total degree of L^k(x1) for k <= nu (degree of one substitution)."""
    return max(max(h.total_degree(), 0) for h in lie_iterates(sys, nu + 1))


def check_probabilistic(
    sys: OdeSystem,
    F: SparsePoly,
    trials: int = 16,
    prime_bits: int = 40,
    seed=0,
) -> VerificationReport:
    """Randomized membership test: evaluate F at jets of random points.

    Each trial draws a fresh prime p and a uniform point of GF(p)^n; the
    substituted polynomial has total degree at most deg F times the worst
    iterated-derivative degree, so a nonzero F slips through one trial
    with probability at most that degree over p.  The report carries the
    summed union bound explicitly.
    """
    if F.space.kind != "deriv":
        raise ValueError("F must be a polynomial in x1 and its derivatives")
    nu = F.space.order
    if nu > sys.n:
        raise ValueError(f"order {nu} exceeds the dimension {sys.n}")
    if F.is_zero:
        return VerificationReport("probabilistic", trials, Fraction(0), True)
    degree_cap = max(F.total_degree(), 0) * _degree_growth(sys, nu)
    rng = fork_rng(seed, "verify")
    bound = Fraction(0)
    outcome = True
    for _ in range(trials):
        while True:
            p = random_prime(prime_bits, rng)
            if p > nu:
                break
        try:
            Fp = F.map_to(GF(p))
        except BadPrimeError:
            continue  # denominator collision; the trial is skipped silently
        sys_p = sys.reduce_mod(p)
        point = [rng.randrange(p) for _ in range(sys.n)]
        values = jet(sys_p, point, nu)
        bound += Fraction(degree_cap, p)
        if Fp.evaluate(values) != 0:
            outcome = False
            break
    return VerificationReport("probabilistic", trials, min(bound, Fraction(1)), outcome)


def check_exact(sys: OdeSystem, F: SparsePoly, max_terms: int = CHECK_TERM_BUDGET) -> VerificationReport:
    """Exact membership: substitute symbolically over QQ and compare with 0.

    The substitution replaces the highest derivative first so cancellation
    happens as early as possible; ``max_terms`` caps intermediate swell
    and exhaustion raises BudgetExceededError — the answer is then
    indeterminate, never silently downgraded to a probabilistic one.
    """
    if F.space.kind != "deriv":
        raise ValueError("F must be a polynomial in x1 and its derivatives")
    residue = reduction(sys, F, max_terms=max_terms)
    return VerificationReport("exact", 0, Fraction(0), residue.is_zero)


def certified_eliminate(
    sys: OdeSystem,
    config: SampleConfig | None = None,
    max_terms: int = CHECK_TERM_BUDGET,
    max_rounds: int = 8,
) -> EliminationResult:
    """Eliminate, exact-check, and double the sampling radius until certified.

    Returns the interpolation result with ``verified`` upgraded to exact.
    A candidate that keeps failing the exact check after ``max_rounds``
    doublings aborts with the last candidate attached to the error, since
    that indicates a systematically unlucky configuration worth inspecting.
    """
    config = config or SampleConfig()
    radius = config.radius
    last = None
    for _ in range(max_rounds):
        attempt = replace(config, radius=radius)
        result = eliminate(sys, attempt)
        last = result.f_min
        report = check_exact(sys, result.f_min, max_terms=max_terms)
        if report.outcome:
            return replace(
                result,
                verified=Verification("exact", trials=0, failure_bound=Fraction(0)),
            )
        radius *= 2
    raise VerificationError(
        f"no candidate passed the exact membership check after {max_rounds} "
        f"radius doublings",
        candidate=last,
    )
