"""Sharp cost per unit length of a defect line, |(Sigma(m+) - Sigma(m-)).nu|.

Two closed forms are evaluated and must agree:

    first:  (n1/2) (p1 p2 - m1- p1^2 - p1^3/3)
    second: |a+ - a-|^3 / (12 sqrt(1 + (a+ + a-)^2/4))
"""

import logging
import math
from dataclasses import asdict, dataclass
from fractions import Fraction

from ..energy.functional import sigma_components
from ..errors import FormulaMismatchError
from .states import JumpSpec

logger = logging.getLogger(__name__)

AGREEMENT_RTOL = 1e-12
JUMP_CONDITION_TOL = 1e-12


@dataclass
class JumpCostResult:
    cost: float
    first_expression: float
    second_expression: float
    degenerate: bool

    def to_dict(self) -> dict:
        return asdict(self)


def first_expression(j: JumpSpec) -> float:
    """(n1/2)(p1 p2 - m1- p1^2 - p1^3/3).

    The bracket cancels down to p1^3/6, so it is formed in exact rational arithmetic from
    the float slopes; otherwise tiny jumps lose every significant digit.
    """
    a_minus, a_plus = Fraction(j.minus.a), Fraction(j.plus.a)
    p1 = a_plus - a_minus
    p2 = (a_plus * a_plus - a_minus * a_minus) / 2
    bracket = p1 * p2 - a_minus * p1 * p1 - p1**3 / 3
    n1 = float(p1) / math.hypot(float(p1), float(p2))
    return 0.5 * n1 * float(bracket)


def second_expression(j: JumpSpec) -> float:
    jump = float(abs(Fraction(j.plus.a) - Fraction(j.minus.a)))
    mean = j.plus.a + j.minus.a
    return jump**3 / (12.0 * math.sqrt(1.0 + 0.25 * mean * mean))


def evaluate_jump_cost(j: JumpSpec, rtol: float = AGREEMENT_RTOL) -> JumpCostResult:
    """Both closed forms, checked against each other."""
    if j.degenerate:
        return JumpCostResult(0.0, 0.0, 0.0, degenerate=True)
    first = first_expression(j)
    second = second_expression(j)
    scale = max(abs(first), abs(second))
    if abs(abs(first) - second) > rtol * scale:
        raise FormulaMismatchError(
            f"Jump cost forms disagree for a-={j.minus.a}, a+={j.plus.a}: {first!r} vs {second!r}"
        )
    return JumpCostResult(abs(first), first, second, degenerate=False)


def jump_cost(j: JumpSpec) -> float:
    return evaluate_jump_cost(j).cost


def sigma_jump_cost(j: JumpSpec) -> float:
    """|(Sigma(m+) - Sigma(m-)).nu| straight from the entropy field."""
    if j.degenerate:
        return 0.0
    plus = sigma_components(*j.plus.m)
    minus = sigma_components(*j.minus.m)
    nu1, nu2 = j.nu
    return abs((plus[0] - minus[0]) * nu1 + (plus[1] - minus[1]) * nu2)


def small_jump_coefficient(a0: float) -> float:
    """Limit of jump_cost(a0 - d, a0 + d) / (2d)^3 as d -> 0."""
    return 1.0 / (12.0 * math.sqrt(1.0 + a0 * a0))


def check_jump_condition(j: JumpSpec, tol: float = JUMP_CONDITION_TOL) -> bool:
    """Continuity of the tangential trace, m+.nu_perp = m-.nu_perp."""
    tau1, tau2 = j.tau
    (mp1, mp2), (mm1, mm2) = j.plus.m, j.minus.m
    plus_trace = mp1 * tau1 + mp2 * tau2
    minus_trace = mm1 * tau1 + mm2 * tau2
    scale = max(1.0, abs(plus_trace), abs(minus_trace))
    ok = abs(plus_trace - minus_trace) <= tol * scale
    if not ok and j.normal is None:
        logger.warning("Derived normal violates the jump condition for %s", j.to_dict())
    return ok
