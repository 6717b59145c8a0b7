"""Boundary conditions at the right endpoint (y(0) = 0 is always imposed)."""
from __future__ import annotations

import enum
import math


class BoundaryCondition(enum.Enum):
    DIRICHLET = "dirichlet"
    DIRICHLET_NEUMANN = "dn"

    @classmethod
    def parse(cls, text: str) -> "BoundaryCondition":
        key = text.strip().lower().replace("-", "_")
        aliases = {"dirichlet": cls.DIRICHLET, "d": cls.DIRICHLET,
                   "dn": cls.DIRICHLET_NEUMANN, "dirichlet_neumann": cls.DIRICHLET_NEUMANN}
        if key not in aliases:
            raise ValueError(f"unknown boundary condition {text!r}")
        return aliases[key]

    def target_phase(self, n: int) -> float:
        """Terminal Pruefer phase of the n-th eigenfunction: n pi, or (n - 1/2) pi."""
        if self is BoundaryCondition.DIRICHLET:
            return n * math.pi
        return (n - 0.5) * math.pi

    def free_eigenvalue(self, n: int, ell: float) -> float:
        """n-th eigenvalue of -y'' on [0, ell] under this condition."""
        return (self.target_phase(n) / ell) ** 2
