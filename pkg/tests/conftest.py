"""Shared test inputs and independent oracles.

Everything is enumerated deterministically (no RNG): "generic looking"
complex data comes from incommensurate trig waves over integer indices, so
every run sees the same values.  The Fock-side oracle here evaluates
polynomials from raw ladder matrices and never goes through the package's
own matrix builder.
"""

import numpy as np
import pytest


def _waves(count: int, salt: float = 0.0) -> np.ndarray:
    k = np.arange(count, dtype=float)
    return np.sin(1.7 * k + salt) + 1j * np.cos(2.3 * k - 0.7 * salt)


def _ladder(n_max: int):
    dim = n_max + 1
    a = np.zeros((dim, dim), dtype=complex)
    for n in range(1, dim):
        a[n - 1, n] = np.sqrt(n)
    return a, a.conj().T


def _poly_matrix(poly, n_max: int) -> np.ndarray:
    """Dense matrix of a normal-form polynomial, built from ladder matrices.

    Independent of cspi.fock: monomials become ad^c @ a^q per mode, modes
    combine by Kronecker product (first mode slowest, matching the package's
    lexicographic basis order).
    """
    a, ad = _ladder(n_max)
    dim = (n_max + 1) ** poly.modes
    total = np.zeros((dim, dim), dtype=complex)
    for key, coeff in poly.terms.items():
        term = None
        for c, q in key:
            factor = np.linalg.matrix_power(ad, c) @ np.linalg.matrix_power(a, q)
            term = factor if term is None else np.kron(term, factor)
        total += coeff * term
    return total


def _block(matrix: np.ndarray, n_max: int, modes: int, margin: int) -> np.ndarray:
    """Sub-block of rows/columns whose occupancies stay below n_max - margin."""
    import itertools

    keep = [
        i
        for i, state in enumerate(itertools.product(range(n_max + 1), repeat=modes))
        if all(n <= n_max - margin for n in state)
    ]
    return matrix[np.ix_(keep, keep)]


@pytest.fixture
def waves():
    return _waves


@pytest.fixture
def poly_matrix():
    return _poly_matrix


@pytest.fixture
def block():
    return _block
