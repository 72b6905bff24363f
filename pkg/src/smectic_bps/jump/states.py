"""Points of the well {m2 = m1^2/2} and the data of one defect line."""

import math
from dataclasses import dataclass
from typing import Optional, Tuple

from ..errors import ConfigError, DegenerateJumpError

Vector = Tuple[float, float]


@dataclass(frozen=True)
class PhaseState:
    """The admissible far-field gradient m = (a, a^2/2)."""

    a: float

    def __post_init__(self):
        if not math.isfinite(self.a):
            raise ConfigError(f"Phase slope must be finite, got {self.a}")

    @property
    def m(self) -> Vector:
        return (self.a, 0.5 * self.a * self.a)


@dataclass(frozen=True)
class JumpSpec:
    """An ordered pair of parabola states.

    p = m+ - m-, n = p/|p| and nu = +-n with nu1 > 0 (p1 = a+ - a- never vanishes for a
    genuine jump). ``normal`` overrides nu, which is only useful to build inadmissible
    orientations on purpose; a degenerate pair without override gets nu = (1, 0).
    """

    minus: PhaseState
    plus: PhaseState
    normal: Optional[Vector] = None

    @classmethod
    def from_slopes(cls, a_minus: float, a_plus: float, normal: Optional[Vector] = None) -> "JumpSpec":
        return cls(PhaseState(float(a_minus)), PhaseState(float(a_plus)), normal)

    @property
    def degenerate(self) -> bool:
        return self.plus.a == self.minus.a

    @property
    def p(self) -> Vector:
        (mp1, mp2), (mm1, mm2) = self.plus.m, self.minus.m
        return (mp1 - mm1, mp2 - mm2)

    @property
    def p_norm(self) -> float:
        return math.hypot(*self.p)

    @property
    def n(self) -> Vector:
        self.require_jump()
        p1, p2 = self.p
        norm = math.hypot(p1, p2)
        return (p1 / norm, p2 / norm)

    @property
    def nu(self) -> Vector:
        if self.normal is not None:
            norm = math.hypot(*self.normal)
            return (self.normal[0] / norm, self.normal[1] / norm)
        if self.degenerate:
            return (1.0, 0.0)
        n1, n2 = self.n
        return (n1, n2) if n1 > 0 else (-n1, -n2)

    @property
    def tau(self) -> Vector:
        """nu rotated by +90 degrees; the tangent of the defect line."""
        nu1, nu2 = self.nu
        return (-nu2, nu1)

    def require_jump(self) -> "JumpSpec":
        if self.degenerate:
            raise DegenerateJumpError(f"a_plus = a_minus = {self.plus.a}: no jump to resolve")
        return self

    def identity_residual(self) -> float:
        """n1 p2 - n2 p1, zero for every genuine parabola pair."""
        p1, p2 = self.p
        n1, n2 = self.n
        return n1 * p2 - n2 * p1

    def tangential_component(self) -> float:
        """m-.tau, shared by both states when nu is parallel to p."""
        tau1, tau2 = self.tau
        m1, m2 = self.minus.m
        return m1 * tau1 + m2 * tau2

    def to_dict(self) -> dict:
        return {"a_minus": self.minus.a, "a_plus": self.plus.a, "nu": list(self.nu), "degenerate": self.degenerate}
