import math

import numpy as np
import pytest

from core.data_models import (
    DimensionError, FockArray, Interferometer, ModeShape, NormalizationError, PureState
)
from core.duality import (
    decompose, decomposition_to_json, first_quantize, reconstruct, schmidt_rank, singlet_weight,
    system_vector
)
from core.evolve import apply
from core.fock import (
    basis, fock_indistinguishable, max_amplitude_difference, pad_labels, partially_distinguishable
)
from core.measure import postselect_vacuum
from tests.conftest import alpha_for, random_unitary

INV_SQRT2 = 1 / math.sqrt(2)


def _random_pair_state(seed, S=3, L=2):
    gen = np.random.default_rng(seed)
    keys = basis(ModeShape(S, L), 2)
    amps = gen.normal(size=len(keys)) + 1j * gen.normal(size=len(keys))
    amps /= np.linalg.norm(amps)
    return PureState(ModeShape(S, L), 2, dict(zip(keys, amps)))


def test_first_quantize_indistinguishable(indistinguishable_pair):
    psi = first_quantize(indistinguishable_pair).amplitudes
    assert psi[0, 0, 1, 0] == pytest.approx(INV_SQRT2)
    assert psi[1, 0, 0, 0] == pytest.approx(INV_SQRT2)
    assert np.sum(np.abs(psi) ** 2) == pytest.approx(1.0)


def test_first_quantize_distinguishable(distinguishable_pair):
    fq = first_quantize(distinguishable_pair)
    assert fq.terms == pytest.approx({((0, 0), (1, 1)): INV_SQRT2, ((1, 1), (0, 0)): INV_SQRT2})
    assert fq.d == 4


def test_first_quantize_double_occupation():
    state = PureState(ModeShape(2, 1), 2, {FockArray(((2,), (0,))): 1.0})
    assert first_quantize(state).terms == pytest.approx({((0, 0), (0, 0)): 1.0})


def test_first_quantize_is_exchange_symmetric():
    psi = first_quantize(_random_pair_state(3)).amplitudes
    np.testing.assert_allclose(psi, psi.transpose(2, 3, 0, 1), atol=1e-12)


def test_decompose_indistinguishable(indistinguishable_pair):
    dec = decompose(indistinguishable_pair)
    assert dec.triplet == pytest.approx({((1, 2), (1, 1)): 1.0})
    assert dec.singlet == {}
    assert schmidt_rank(indistinguishable_pair) == 1
    assert singlet_weight(indistinguishable_pair) == pytest.approx(0.0, abs=1e-15)


def test_decompose_distinguishable(distinguishable_pair):
    dec = decompose(distinguishable_pair)
    assert dec.triplet == pytest.approx({((1, 2), (1, 2)): INV_SQRT2}, abs=1e-12)
    assert dec.singlet == pytest.approx({((1, 2), (1, 2)): INV_SQRT2}, abs=1e-12)
    assert schmidt_rank(distinguishable_pair) == 2
    assert singlet_weight(distinguishable_pair) == pytest.approx(0.5)
    assert dec.schmidt_coefficients[:2] == pytest.approx((INV_SQRT2, INV_SQRT2))
    assert max(dec.schmidt_coefficients[2:]) <= 1e-12


def test_singlet_weight_over_partial_distinguishability(beta_grid):
    for beta in beta_grid:
        state = partially_distinguishable(2, alpha_for(beta), beta)
        weight = singlet_weight(state)
        assert weight == pytest.approx(beta * beta / 2, abs=1e-12)
        assert (schmidt_rank(state) == 1) == (weight <= 1e-12)


def test_filtered_state_has_no_singlet(filter_u):
    outcome = postselect_vacuum(apply(filter_u, partially_distinguishable(3, 0.6, 0.8)), 1)
    assert singlet_weight(outcome.conditional_state) <= 1e-12
    assert schmidt_rank(outcome.conditional_state) == 1


def _filtered(filter_u, beta):
    return postselect_vacuum(apply(filter_u, partially_distinguishable(3, alpha_for(beta), beta)), 1).conditional_state


def test_filtered_system_factor_does_not_depend_on_beta(filter_u, beta_grid):
    reference = system_vector(_filtered(filter_u, 0.0))
    for beta in beta_grid:
        assert abs(np.vdot(reference, system_vector(_filtered(filter_u, beta)))) == pytest.approx(1.0, abs=1e-10)
    # the Label factor does move with beta
    assert max_amplitude_difference(_filtered(filter_u, 0.0), _filtered(filter_u, 1.0), up_to_phase=True) > 0.5


def test_system_vector_tells_spatial_states_apart(filter_u):
    other = system_vector(fock_indistinguishable(3, (1, 2)))
    assert abs(np.vdot(other, system_vector(_filtered(filter_u, 0.5)))) <= 1e-12


def test_singlet_only_state_has_no_system_vector():
    singlet = PureState(ModeShape(2, 2), 2, {
        FockArray(((1, 0), (0, 1))): INV_SQRT2,
        FockArray(((0, 1), (1, 0))): -INV_SQRT2,
    })
    assert singlet_weight(singlet) == pytest.approx(1.0)
    with pytest.raises(NormalizationError):
        system_vector(singlet)


def test_singlet_weight_of_empty_state_is_an_error(filter_u):
    empty = postselect_vacuum(fock_indistinguishable(3, (1, 2)), 1).unnormalized_state
    with pytest.raises(NormalizationError):
        singlet_weight(empty)


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_decompose_is_invertible(seed):
    state = _random_pair_state(seed)
    dec = decompose(state)
    np.testing.assert_allclose(reconstruct(dec).amplitudes, first_quantize(state).amplitudes, atol=1e-12)
    assert dec.triplet_weight + dec.singlet_weight == pytest.approx(1.0, abs=1e-10)


def test_unused_labels_are_projected_out(distinguishable_pair):
    padded = pad_labels(distinguishable_pair, 4)
    dec = decompose(padded)
    assert dec.labels == (0, 1)
    assert reconstruct(dec).amplitudes.shape == (2, 4, 2, 4)
    np.testing.assert_allclose(reconstruct(dec).amplitudes, first_quantize(padded).amplitudes, atol=1e-12)


def test_schmidt_labels_keep_original_indices():
    state = pad_labels(fock_indistinguishable(2, (1, 2)), 2)
    moved = PureState(state.shape, 2, {FockArray(((0, 1), (0, 1))): 1.0})
    assert decompose(moved).triplet == pytest.approx({((1, 2), (2, 2)): 1.0})


@pytest.mark.parametrize("seed", [10, 11, 12])
def test_system_unitaries_keep_schmidt_coefficients(seed):
    state = _random_pair_state(seed)
    u = Interferometer(random_unitary(3, seed=seed))
    before = decompose(state).schmidt_coefficients
    after = decompose(apply(u, state)).schmidt_coefficients
    assert after == pytest.approx(before, abs=1e-10)
    assert schmidt_rank(apply(u, state)) <= schmidt_rank(state)


def test_two_photons_required():
    with pytest.raises(DimensionError):
        decompose(fock_indistinguishable(3, (1, 2, 3)))
    with pytest.raises(DimensionError):
        first_quantize(fock_indistinguishable(3, (1,)))


def test_decomposition_json(distinguishable_pair):
    data = decomposition_to_json(decompose(distinguishable_pair))
    assert set(data) == {"triplet", "singlet", "schmidt_coefficients", "weights"}
    assert data["singlet"][0]["system"] == [1, 2]
    assert data["weights"]["singlet"] == pytest.approx(0.5)
