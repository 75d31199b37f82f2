"""Exact discrete path-integral constructions on the imaginary-time lattice.

The three action evaluators differ only in how the Hamiltonian symbol enters:
the normal-order action couples adjacent slices through H(z_l^dag, z_{l+1}),
the anti-normal action uses equal-slice arguments of the anti-normal symbol,
and the symmetric-order action replaces the kinetic difference with the
tan(omega/2)-weighted frequency sum (and exists only for odd N, where the
underlying determinant 2^{1-N} is nonzero).

All frequency sums are accumulated over conjugate +-omega pairs with the
zero frequency last, and all products live in the log domain (2^{N-1}
overflows doubles near N ~ 2100).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .algebra import Ordering, SymbolPoly
from .errors import (
    EvenSliceCountError,
    ModeMismatchError,
    OrderingTagError,
    SingularityError,
)
from .fock import QuadraticModel

#: absolute tolerance on a frequency denominator before declaring a pole
POLE_TOL = 1e-14


@dataclass(frozen=True)
class MatsubaraGrid:
    """Imaginary-time lattice: N slices over total length beta, step beta/N."""

    N: int
    beta: float

    def __post_init__(self):
        if self.N < 1:
            raise ValueError(f"slice count must be >= 1, got {self.N}")
        if not self.beta > 0:
            raise ValueError(f"beta must be positive, got {self.beta}")

    @property
    def delta(self) -> float:
        return self.beta / self.N

    def frequency_indices(self) -> np.ndarray:
        """Signed indices n with omega_n = 2 pi n / N, in DFT row order.

        For odd N this is the symmetric set -(N-1)/2 ... (N-1)/2; for even N
        the omega = pi entry is its own negative modulo 2 pi.
        """
        k = np.arange(self.N)
        return np.where(k < (self.N + 1) // 2, k, k - self.N)

    def frequencies(self) -> np.ndarray:
        return 2.0 * np.pi * self.frequency_indices() / self.N

    def require_odd(self, what: str) -> None:
        if self.N % 2 == 0:
            raise EvenSliceCountError(
                f"{what} needs odd N (the symmetric-order determinant vanishes "
                f"for even N); got N={self.N}"
            )


class DiscretePath:
    """Periodic complex path: N slices x M modes, in time or frequency form.

    Frequency rows follow DFT order; ``amplitude(n)`` addresses the signed
    frequency index.  Periodicity (z_N = z_0) is implicit in all slice
    arithmetic via cyclic indexing.
    """

    def __init__(self, values, domain: str = "time"):
        if domain not in ("time", "frequency"):
            raise ValueError(f"domain must be 'time' or 'frequency', got {domain!r}")
        values = np.asarray(values, dtype=complex)
        if values.ndim == 1:
            values = values[:, np.newaxis]
        if values.ndim != 2 or values.shape[0] < 1:
            raise ValueError("path values must have shape (N,) or (N, M)")
        self.values = values
        self.domain = domain

    @property
    def slices(self) -> int:
        return self.values.shape[0]

    @property
    def modes(self) -> int:
        return self.values.shape[1]

    def amplitude(self, n: int) -> np.ndarray:
        """Fourier amplitude vector at signed frequency index n."""
        if self.domain != "frequency":
            raise ValueError("amplitude() needs a frequency-domain path")
        return self.values[n % self.slices]


def dft(path: DiscretePath) -> DiscretePath:
    """Unitary transform to frequency amplitudes: z_l = N^{-1/2} sum z_w e^{iwl}."""
    if path.domain != "time":
        raise ValueError("dft expects a time-domain path")
    return DiscretePath(np.fft.fft(path.values, axis=0, norm="ortho"), "frequency")


def idft(path: DiscretePath) -> DiscretePath:
    """Inverse of :func:`dft`; round trip is the identity to unitary precision."""
    if path.domain != "frequency":
        raise ValueError("idft expects a frequency-domain path")
    return DiscretePath(np.fft.ifft(path.values, axis=0, norm="ortho"), "time")


def _time_values(path: DiscretePath) -> np.ndarray:
    return path.values if path.domain == "time" else idft(path).values


def _frequency_values(path: DiscretePath) -> np.ndarray:
    return path.values if path.domain == "frequency" else dft(path).values


def _check_action_args(path, symbol, grid, expected: Ordering):
    if symbol.ordering is not expected:
        raise OrderingTagError(
            f"action for {expected.value} order got a symbol tagged "
            f"{symbol.ordering.value}; the slice coupling differs between "
            "orderings, so mixing them silently would be wrong"
        )
    if path.modes != symbol.modes:
        raise ModeMismatchError(
            f"path has {path.modes} modes, symbol has {symbol.modes}"
        )
    if path.slices != grid.N:
        raise ValueError(f"path has {path.slices} slices, grid expects {grid.N}")


def action_normal(path: DiscretePath, H: SymbolPoly, grid: MatsubaraGrid) -> complex:
    """- sum_l [ z_l^dag (z_l - z_{l+1}) + Delta H(z_l^dag, z_{l+1}) ].

    The Hamiltonian takes cross-slice arguments: conjugates from slice l,
    plain variables from slice l+1.
    """
    _check_action_args(path, H, grid, Ordering.NORMAL)
    z = _time_values(path)
    z_next = np.roll(z, -1, axis=0)
    kinetic = np.sum(np.conj(z) * (z - z_next))
    hamiltonian = grid.delta * np.sum(H.evaluate(np.conj(z), z_next))
    return complex(-(kinetic + hamiltonian))


def action_antinormal(path: DiscretePath, h: SymbolPoly, grid: MatsubaraGrid) -> complex:
    """- sum_l [ z_l^dag (z_l - z_{l+1}) + Delta h(z_l^dag, z_l) ];  equal-slice h."""
    _check_action_args(path, h, grid, Ordering.ANTINORMAL)
    z = _time_values(path)
    z_next = np.roll(z, -1, axis=0)
    kinetic = np.sum(np.conj(z) * (z - z_next))
    hamiltonian = grid.delta * np.sum(h.evaluate(np.conj(z), z))
    return complex(-(kinetic + hamiltonian))


def action_weyl(path: DiscretePath, HW: SymbolPoly, grid: MatsubaraGrid) -> complex:
    """2i sum_w z_w^dag z_w tan(w/2) - sum_l Delta HW(z_l^dag, z_l);  odd N only."""
    grid.require_odd("the symmetric-order action")
    _check_action_args(path, HW, grid, Ordering.WEYL)
    z_time = _time_values(path)
    z_freq = _frequency_values(path)
    half_tan = np.tan(grid.frequencies() / 2.0)
    berry = 2j * np.sum(np.abs(z_freq) ** 2 * half_tan[:, np.newaxis])
    hamiltonian = grid.delta * np.sum(HW.evaluate(np.conj(z_time), z_time))
    return complex(berry - hamiltonian)


@dataclass(frozen=True)
class BerryDeterminant:
    """prod_w (1 + e^{iw})/2 per mode, in log form; zero is flagged, not -inf."""

    log_value: float | None
    is_zero: bool


def berry_determinant_log(N: int, modes: int = 1) -> BerryDeterminant:
    """Closed form of the kinetic determinant factor: (2^{1-N})^M, odd N only.

    Follows from factoring z^N - 1 over the N-th roots of unity at z = -1;
    even N contains omega = pi, whose factor vanishes and kills the
    symmetric-order construction.
    """
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    if modes < 1:
        raise ValueError(f"modes must be >= 1, got {modes}")
    if N % 2 == 0:
        return BerryDeterminant(None, True)
    return BerryDeterminant((1 - N) * modes * math.log(2.0), False)


def normal_discrete_dFdA(grid: MatsubaraGrid, model: QuadraticModel) -> float:
    """dF/dA of the exact normal-order lattice Gaussian, any N >= 1.

    Re sum_w 1 / (N (e^{-iw} - 1 + beta A / N)), accumulated over conjugate
    +-omega pairs with omega = 0 last; the paired imaginary parts cancel and
    the residual is asserted.  Converges to the exact value like 1/N.
    """
    if model.A == 0:
        raise SingularityError("normal-order dF/dA has a pole at A = 0")
    N = grid.N
    c = grid.beta * model.A / N

    top = (N - 1) // 2
    n = np.arange(top, 0, -1)
    omega = 2.0 * np.pi * n / N
    den_pos = np.exp(-1j * omega) - 1.0 + c
    den_neg = np.exp(+1j * omega) - 1.0 + c
    denominators = [den_pos, den_neg]
    if N % 2 == 0:  # self-paired omega = pi entry
        denominators.append(np.array([np.exp(-1j * np.pi) - 1.0 + c]))
    denominators.append(np.array([complex(c)]))  # omega = 0, last
    if min(np.abs(d).min(initial=np.inf) for d in denominators) < POLE_TOL:
        raise SingularityError(
            f"frequency denominator within {POLE_TOL} of zero at beta*A={c * N}"
        )

    total = np.sum(1.0 / (N * den_pos) + 1.0 / (N * den_neg))
    if N % 2 == 0:
        total += 1.0 / (N * (np.exp(-1j * np.pi) - 1.0 + c))
    total += 1.0 / (N * c)
    assert abs(total.imag) < 1e-10, f"paired sum left imaginary residue {total.imag}"
    return float(total.real)


def weyl_discrete_dFdA(grid: MatsubaraGrid, model: QuadraticModel) -> float:
    """dF/dA of the symmetric-order lattice Gaussian (A-derivative of logZ).

    -1/2 + Re sum_w 1 / (N (beta A / N - 2i tan(w/2))), paired like the
    normal-order sum.  Same N -> infinity limit as the exact derivative.
    """
    grid.require_odd("the symmetric-order lattice dF/dA")
    if model.A == 0:
        raise SingularityError("symmetric-order dF/dA has a pole at A = 0")
    N = grid.N
    c = grid.beta * model.A / N
    n = np.arange((N - 1) // 2, 0, -1)
    half_tan = np.tan(np.pi * n / N)
    pair = 1.0 / (N * (c - 2j * half_tan)) + 1.0 / (N * (c + 2j * half_tan))
    total = np.sum(pair) + 1.0 / (N * c)
    assert abs(total.imag) < 1e-10, f"paired sum left imaginary residue {total.imag}"
    return float(total.real) - 0.5


def weyl_discrete_logZ_quadratic(grid: MatsubaraGrid, model: QuadraticModel) -> float:
    """log of the symmetric-order lattice partition function, harmonic model.

    With HW = A zbar z - A/2 the integral is Gaussian per frequency:

        logZ_N = (N-1) ln 2 + beta A / 2 - sum_w ln(beta A / N - 2i tan(w/2)),

    where each +-omega pair multiplies to the real positive
    (beta A / N)^2 + 4 tan^2(w/2) (imaginary residue asserted) and omega = 0
    contributes ln(beta A / N) last.  Converges to -ln(1 - e^{-beta A}).
    """
    grid.require_odd("the symmetric-order lattice partition function")
    if model.A <= 0:
        raise SingularityError(
            "the frequency-domain Gaussian needs A > 0 (omega = 0 diverges otherwise)"
        )
    N = grid.N
    c = grid.beta * model.A / N
    n = np.arange((N - 1) // 2, 0, -1)
    half_tan = np.tan(np.pi * n / N)
    pair = (c - 2j * half_tan) * (c + 2j * half_tan)
    assert np.abs(pair.imag).max(initial=0.0) < 1e-12, "pair products must be real"
    log_sum = float(np.sum(np.log(pair.real))) + math.log(c)
    return (N - 1) * math.log(2.0) + grid.beta * model.A / 2.0 - log_sum
