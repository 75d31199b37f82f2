"""Lattice constructions: DFT conventions, actions, determinants, Gaussians."""

import math

import numpy as np
import pytest

from cspi import (
    DiscretePath,
    EvenSliceCountError,
    MatsubaraGrid,
    Ordering,
    OrderingTagError,
    QuadraticModel,
    SingularityError,
    SymbolPoly,
    action_antinormal,
    action_normal,
    action_weyl,
    berry_determinant_log,
    dft,
    exact_dFdA,
    idft,
    normal_discrete_dFdA,
    weyl_discrete_dFdA,
    weyl_discrete_logZ_quadratic,
)

HARMONIC = 1.3  # generic A used in slice-sum oracles


def _symbol(ordering, shift=0.0, coeff=HARMONIC):
    terms = {((1, 1),): coeff}
    if shift:
        terms[((0, 0),)] = shift
    return SymbolPoly(terms, 1, ordering)


# -- grid and transform ------------------------------------------------------


def test_grid_basics():
    grid = MatsubaraGrid(5, 2.0)
    assert grid.delta == pytest.approx(0.4)
    assert list(grid.frequency_indices()) == [0, 1, 2, -2, -1]
    with pytest.raises(ValueError):
        MatsubaraGrid(0, 1.0)
    with pytest.raises(ValueError):
        MatsubaraGrid(3, -1.0)


@pytest.mark.parametrize("N", [1, 2, 3, 4, 5, 8, 9])
def test_frequency_set_closed_under_negation(N):
    phases = np.exp(1j * MatsubaraGrid(N, 1.0).frequencies())
    for phase in phases:
        assert np.min(np.abs(phases - np.conj(phase))) < 1e-12


def test_dft_constant_path():
    grid_N = 7
    path = DiscretePath(np.full(grid_N, 0.3 - 0.2j))
    amps = dft(path)
    assert amps.amplitude(0)[0] == pytest.approx(math.sqrt(grid_N) * (0.3 - 0.2j))
    others = [amps.amplitude(n)[0] for n in range(1, grid_N)]
    assert np.abs(others).max() < 1e-15


def test_dft_single_frequency_basis_vector():
    N, n1 = 9, 2
    ell = np.arange(N)
    path = DiscretePath(np.exp(2j * np.pi * n1 * ell / N) / math.sqrt(N))
    amps = dft(path)
    assert amps.amplitude(n1)[0] == pytest.approx(1.0)
    assert np.abs(np.delete(amps.values[:, 0], n1)).max() < 1e-15


def test_dft_round_trip_and_parseval(waves):
    values = np.column_stack([waves(11, salt=1.0), waves(11, salt=2.5)])
    path = DiscretePath(values)
    back = idft(dft(path))
    assert np.abs(back.values - values).max() < 1e-13
    freq = dft(path)
    assert abs(
        np.sum(np.abs(values) ** 2) - np.sum(np.abs(freq.values) ** 2)
    ) < 1e-12
    with pytest.raises(ValueError):
        dft(freq)
    with pytest.raises(ValueError):
        idft(path)


# -- actions -----------------------------------------------------------------


def test_action_normal_trivial_paths():
    grid = MatsubaraGrid(6, 1.5)
    zero = DiscretePath(np.zeros(6, dtype=complex))
    H = _symbol(Ordering.NORMAL)
    assert action_normal(zero, H, grid) == 0.0
    c = 0.4 + 0.7j
    const = DiscretePath(np.full(6, c))
    # kinetic term cancels on constants; Hamiltonian gives -beta A |c|^2
    expected = -grid.beta * HARMONIC * abs(c) ** 2
    assert action_normal(const, H, grid) == pytest.approx(expected, abs=1e-14)


def test_action_normal_three_slice_oracle(waves):
    grid = MatsubaraGrid(3, 0.8)
    z = waves(3, salt=3.0)
    path = DiscretePath(z)
    # independent summation: cross-slice Hamiltonian arguments (l, l+1)
    expected = 0.0
    for l in range(3):
        z_next = z[(l + 1) % 3]
        expected -= np.conj(z[l]) * (z[l] - z_next)
        expected -= grid.delta * HARMONIC * np.conj(z[l]) * z_next
    assert action_normal(path, _symbol(Ordering.NORMAL), grid) == pytest.approx(expected)


def test_action_normal_quartic_oracle(waves):
    grid = MatsubaraGrid(5, 1.1)
    z = waves(5, salt=8.0)
    path = DiscretePath(z)
    H = SymbolPoly({((2, 2),): 0.6, ((1, 1),): HARMONIC}, 1, Ordering.NORMAL)
    expected = 0.0
    for l in range(5):
        z_next = z[(l + 1) % 5]
        expected -= np.conj(z[l]) * (z[l] - z_next)
        expected -= grid.delta * (
            0.6 * np.conj(z[l]) ** 2 * z_next**2 + HARMONIC * np.conj(z[l]) * z_next
        )
    assert action_normal(path, H, grid) == pytest.approx(expected)


def test_action_antinormal_equal_slice(waves):
    grid = MatsubaraGrid(3, 0.8)
    z = waves(3, salt=3.5)
    path = DiscretePath(z)
    h = _symbol(Ordering.ANTINORMAL, shift=-HARMONIC)
    expected = 0.0
    for l in range(3):
        z_next = z[(l + 1) % 3]
        expected -= np.conj(z[l]) * (z[l] - z_next)
        expected -= grid.delta * (HARMONIC * abs(z[l]) ** 2 - HARMONIC)
    assert action_antinormal(path, h, grid) == pytest.approx(expected)
    zero = DiscretePath(np.zeros(3, dtype=complex))
    # constant shift survives on the zero path: -beta * (-A)
    assert action_antinormal(zero, h, grid) == pytest.approx(grid.beta * HARMONIC)
    c = 0.5 - 0.2j
    const = DiscretePath(np.full(3, c))
    assert action_antinormal(const, h, grid) == pytest.approx(
        -grid.beta * (HARMONIC * abs(c) ** 2 - HARMONIC)
    )


def test_action_weyl_against_slice_oracle(waves):
    N, beta = 7, 0.9
    grid = MatsubaraGrid(N, beta)
    z = waves(N, salt=4.2)
    path = DiscretePath(z)
    HW = _symbol(Ordering.WEYL, shift=-HARMONIC / 2)
    # oracle: own DFT loop, tan-weighted frequency sum, slice Hamiltonian sum
    berry = 0.0
    for n in range(-(N - 1) // 2, (N - 1) // 2 + 1):
        amp = sum(z[l] * np.exp(-2j * np.pi * n * l / N) for l in range(N)) / math.sqrt(N)
        berry += 2j * abs(amp) ** 2 * math.tan(math.pi * n / N)
    ham = sum(
        (beta / N) * (HARMONIC * abs(z[l]) ** 2 - HARMONIC / 2) for l in range(N)
    )
    assert action_weyl(path, HW, grid) == pytest.approx(berry - ham, abs=1e-12)


def test_action_weyl_single_frequency_path():
    N, beta, n1 = 9, 1.0, 2
    grid = MatsubaraGrid(N, beta)
    amp = 0.8 - 0.3j
    freq = np.zeros((N, 1), dtype=complex)
    freq[n1, 0] = amp
    path = idft(DiscretePath(freq, domain="frequency"))
    HW = _symbol(Ordering.WEYL)
    # sum_l |z_l|^2 = |amp|^2 (Parseval), so the Hamiltonian sum is Delta*A*|amp|^2
    expected = (
        2j * abs(amp) ** 2 * math.tan(math.pi * n1 / N)
        - beta * HARMONIC * abs(amp) ** 2 / N
    )
    assert action_weyl(path, HW, grid) == pytest.approx(expected, abs=1e-12)


def test_action_weyl_berry_term_imaginary(waves):
    grid = MatsubaraGrid(9, 1.0)
    berry_only = SymbolPoly({}, 1, Ordering.WEYL)
    generic = DiscretePath(waves(9, salt=5.5))
    assert abs(action_weyl(generic, berry_only, grid).real) < 1e-12
    real_path = DiscretePath(np.real(waves(9, salt=6.0)).astype(complex))
    assert abs(action_weyl(real_path, berry_only, grid)) < 1e-12


def test_action_weyl_refuses_even_N():
    grid = MatsubaraGrid(8, 1.0)
    path = DiscretePath(np.zeros(8, dtype=complex))
    with pytest.raises(EvenSliceCountError):
        action_weyl(path, _symbol(Ordering.WEYL), grid)


def test_action_tag_mismatch_refused(waves):
    grid = MatsubaraGrid(5, 1.0)
    path = DiscretePath(waves(5))
    with pytest.raises(OrderingTagError):
        action_normal(path, _symbol(Ordering.WEYL), grid)
    with pytest.raises(OrderingTagError):
        action_antinormal(path, _symbol(Ordering.NORMAL), grid)
    with pytest.raises(OrderingTagError):
        action_weyl(path, _symbol(Ordering.ANTINORMAL), grid)


@pytest.mark.parametrize("shift", [1, 2, 4])
def test_actions_cyclic_shift_invariant(waves, shift):
    N = 7
    grid = MatsubaraGrid(N, 1.2)
    z = waves(N, salt=7.0)
    shifted = np.roll(z, shift)
    pairs = [
        (action_normal, _symbol(Ordering.NORMAL)),
        (action_antinormal, _symbol(Ordering.ANTINORMAL, shift=-HARMONIC)),
        (action_weyl, _symbol(Ordering.WEYL, shift=-HARMONIC / 2)),
    ]
    for evaluator, symbol in pairs:
        original = evaluator(DiscretePath(z), symbol, grid)
        rolled = evaluator(DiscretePath(shifted), symbol, grid)
        assert abs(original - rolled) < 1e-12


# -- determinant product identity ---------------------------------------------


def test_berry_determinant_closed_values():
    assert berry_determinant_log(1).log_value == 0.0
    assert berry_determinant_log(3).log_value == pytest.approx(math.log(0.25))
    even = berry_determinant_log(4)
    assert even.is_zero and even.log_value is None
    assert berry_determinant_log(5, modes=3).log_value == pytest.approx(
        3 * (1 - 5) * math.log(2.0)
    )


def test_berry_determinant_against_direct_product():
    # direct oracle accumulates logs (the raw product underflows near N~2100):
    # the +-w pair product is cos^2(w/2), the w=0 factor is 1
    for N in range(1, 202, 2):
        direct = sum(
            2.0 * math.log(math.cos(math.pi * n / N)) for n in range(1, (N - 1) // 2 + 1)
        )
        assert abs(berry_determinant_log(N).log_value - direct) < 1e-10


# -- frequency-domain Gaussians ------------------------------------------------


def test_normal_discrete_single_slice():
    model = QuadraticModel(A=2.0, beta=1.5)
    value = normal_discrete_dFdA(MatsubaraGrid(1, 1.5), model)
    assert value == pytest.approx(1.0 / 3.0, rel=1e-14)


def test_normal_discrete_converges_to_exact():
    model = QuadraticModel(A=1.0, beta=1.0)
    exact = exact_dFdA(model)
    errors = []
    for N in (10**3, 10**4, 10**5):
        value = normal_discrete_dFdA(MatsubaraGrid(N, 1.0), model)
        errors.append(abs(value - exact))
    assert errors[-1] / exact <= 1e-3
    slope = np.polyfit(np.log([1e3, 1e4, 1e5]), np.log(errors), 1)[0]
    assert abs(slope + 1.0) <= 0.15


def test_normal_discrete_even_N_supported():
    model = QuadraticModel(A=1.0, beta=1.0)
    exact = exact_dFdA(model)
    assert abs(normal_discrete_dFdA(MatsubaraGrid(10**4, 1.0), model) - exact) < 1e-3


def test_normal_discrete_pole_detection():
    with pytest.raises(SingularityError):
        normal_discrete_dFdA(MatsubaraGrid(3, 1.0), QuadraticModel(A=0.0, beta=1.0))
    # beta A / N = 2 puts the omega = pi denominator exactly at zero
    with pytest.raises(SingularityError):
        normal_discrete_dFdA(MatsubaraGrid(2, 1.0), QuadraticModel(A=4.0, beta=1.0))


def test_weyl_logZ_single_slice():
    model = QuadraticModel(A=0.7, beta=2.0)
    value = weyl_discrete_logZ_quadratic(MatsubaraGrid(1, 2.0), model)
    beta_A = 1.4
    assert value == pytest.approx(beta_A / 2.0 - math.log(beta_A), rel=1e-14)


def test_weyl_logZ_converges_to_fock_geometric_series():
    from cspi import FockBasis, hamiltonian_matrix, partition_function, suggested_n_max
    from cspi import BosonPoly, multiply

    model = QuadraticModel(A=1.0, beta=1.0)
    number = multiply(BosonPoly.create(0), BosonPoly.annihilate(0))
    basis = FockBasis(1, suggested_n_max(model))
    target = math.log(partition_function(hamiltonian_matrix(number, basis), 1.0))
    errors = []
    for N in (21, 201, 2001):
        value = weyl_discrete_logZ_quadratic(MatsubaraGrid(N, 1.0), model)
        errors.append(abs(value - target))
    assert errors == sorted(errors, reverse=True)
    assert errors[-1] / abs(target) <= 1e-3


def test_weyl_logZ_refusals():
    model = QuadraticModel(A=1.0, beta=1.0)
    with pytest.raises(EvenSliceCountError):
        weyl_discrete_logZ_quadratic(MatsubaraGrid(10, 1.0), model)
    with pytest.raises(SingularityError):
        weyl_discrete_logZ_quadratic(MatsubaraGrid(11, 1.0), QuadraticModel(A=-1.0, beta=1.0))


def test_weyl_dFdA_values_and_convergence():
    model = QuadraticModel(A=2.0, beta=1.5)
    value = weyl_discrete_dFdA(MatsubaraGrid(1, 1.5), model)
    assert value == pytest.approx(1.0 / 3.0 - 0.5, rel=1e-14)
    model = QuadraticModel(A=1.0, beta=1.0)
    err = abs(weyl_discrete_dFdA(MatsubaraGrid(2001, 1.0), model) - exact_dFdA(model))
    assert err / exact_dFdA(model) < 1e-3
    with pytest.raises(EvenSliceCountError):
        weyl_discrete_dFdA(MatsubaraGrid(4, 1.0), model)
