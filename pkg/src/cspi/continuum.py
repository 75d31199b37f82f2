"""Continuum-limit machinery: sharp-cutoff Matsubara sums and the
normalization prefactor of the cutoff functional integral.

The cutoff is a hard symmetric window |l| <= b on the continuum frequencies
omega_l = 2 pi l / beta (smooth windows would change the high-frequency
bookkeeping these sums are about).  The normal-order cutoff series lands on
(1/2) coth(beta A / 2) -- off by the constant the exact answer subtracts --
while the Weyl shift of -1/2 makes it exact; the difference between
orderings is b-independent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .algebra import Ordering
from .errors import EvenSliceCountError, SingularityError
from .fock import QuadraticModel

#: constant added to the cutoff frequency sum by each ordering's symbol shift
ORDERING_SHIFT = {
    Ordering.NORMAL: 0.0,
    Ordering.ANTINORMAL: -1.0,
    Ordering.WEYL: -0.5,
}


@dataclass(frozen=True)
class CutoffSpec:
    """Symmetric frequency window |l| <= b at inverse temperature beta."""

    b: int
    beta: float

    def __post_init__(self):
        if self.b < 0:
            raise ValueError(f"cutoff index must be >= 0, got {self.b}")
        if not self.beta > 0:
            raise ValueError(f"beta must be positive, got {self.beta}")

    def frequencies(self) -> np.ndarray:
        ell = np.arange(-self.b, self.b + 1)
        return 2.0 * np.pi * ell / self.beta


def cutoff_dFdA(model: QuadraticModel, spec: CutoffSpec, ordering: Ordering) -> float:
    """Re sum_{|l|<=b} 1/(i beta omega_l + beta A) plus the ordering shift.

    Accumulated over +-l pairs (l = 0 last); the tail beyond b falls off
    like 1/b, so the normal-order value approaches (1/2) coth(beta A / 2)
    and the Weyl value approaches the exact derivative.
    """
    if model.A == 0:
        raise SingularityError("cutoff dF/dA has a pole at A = 0")
    bA = model.beta * model.A
    ell = np.arange(spec.b, 0, -1)
    pair = 1.0 / (2j * np.pi * ell + bA) + 1.0 / (-2j * np.pi * ell + bA)
    total = np.sum(pair) + 1.0 / bA
    assert abs(total.imag) < 1e-10, f"paired sum left imaginary residue {total.imag}"
    return float(total.real) + ORDERING_SHIFT[ordering]


def prefactor_log_closed(b: int, beta: float, modes: int = 1) -> float:
    """log of the closed-form prefactor [beta^-(2b+1) (2 pi)^(2b) (b!)^2]^M."""
    if b < 0:
        raise ValueError(f"cutoff index must be >= 0, got {b}")
    if not beta > 0:
        raise ValueError(f"beta must be positive, got {beta}")
    if modes < 1:
        raise ValueError(f"modes must be >= 1, got {modes}")
    return modes * (
        -(2 * b + 1) * math.log(beta)
        + 2 * b * math.log(2.0 * math.pi)
        + 2.0 * math.lgamma(b + 1)
    )


def prefactor_log_empirical(N: int, b: int, beta: float, modes: int = 1) -> float:
    """log of (N/beta)^{(2b+1)M} times the lattice shell product for c_{B,b}.

    c_{B,b} = 2^{(N-1)M} prod_{B'=b+1}^{B} (4 tan^2(pi B'/N))^{-M} with
    B = (N-1)/2, accumulated in the log domain.  Approaches the closed form
    in the regime 1 << b << B with b^3 << B^2.
    """
    if N < 1 or N % 2 == 0:
        raise EvenSliceCountError(f"shell product is defined for odd N, got {N}")
    if not beta > 0:
        raise ValueError(f"beta must be positive, got {beta}")
    if modes < 1:
        raise ValueError(f"modes must be >= 1, got {modes}")
    B = (N - 1) // 2
    if not 0 <= b <= B:
        raise ValueError(f"need 0 <= b <= (N-1)/2 = {B}, got b={b}")
    shells = np.arange(B, b, -1)
    half_tan = np.tan(np.pi * shells / N)
    if shells.size and (not np.all(np.isfinite(half_tan)) or np.any(half_tan == 0.0)):
        raise SingularityError("tangent pole in the shell product")
    shell_log = float(np.sum(np.log(4.0 * half_tan * half_tan)))
    return (
        (2 * b + 1) * modes * math.log(N / beta)
        + (N - 1) * modes * math.log(2.0)
        - modes * shell_log
    )
