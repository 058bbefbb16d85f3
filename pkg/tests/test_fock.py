import math

import numpy as np
import pytest

from core.data_models import (
    DimensionError, FockArray, ModeShape, NormalizationError, ParameterError, PureState
)
from core.fock import (
    basis, compositions, creation_operator_expansion, fock_distinguishable, fock_indistinguishable,
    from_label_overlap, general_two_photon, inner_product, max_amplitude_difference, normalize,
    overlap_gram, pad_labels, partially_distinguishable, scaled, state_from_json, state_to_json,
    trim_labels
)


def test_indistinguishable_pair(indistinguishable_pair):
    assert indistinguishable_pair.shape == ModeShape(2, 1)
    assert indistinguishable_pair.terms == {FockArray(((1,), (1,))): 1}


def test_distinguishable_pair(distinguishable_pair):
    assert distinguishable_pair.shape == ModeShape(2, 2)
    assert distinguishable_pair.terms == {FockArray(((1, 0), (0, 1))): 1}


@pytest.mark.parametrize("modes", [(1, 1), (0, 1), (1, 3)])
def test_bad_input_modes(modes):
    with pytest.raises(DimensionError):
        fock_indistinguishable(2, modes)


def test_partially_distinguishable_terms():
    state = partially_distinguishable(3, 0.6, 0.8j)
    assert state.amplitude(FockArray(((1, 0), (1, 0), (0, 0)))) == pytest.approx(0.6)
    assert state.amplitude(FockArray(((1, 0), (0, 1), (0, 0)))) == pytest.approx(0.8j)


def test_partially_distinguishable_requires_normalization():
    with pytest.raises(NormalizationError):
        partially_distinguishable(3, 1.0, 1.0)


def test_normalized_flag_is_enforced():
    with pytest.raises(NormalizationError):
        PureState(ModeShape(2, 1), 2, {FockArray(((1,), (1,))): 2.0})


def test_mismatched_fock_array_rejected():
    with pytest.raises(DimensionError):
        PureState(ModeShape(2, 1), 2, {FockArray(((1,), (0,))): 1.0})


def test_tiny_amplitudes_are_pruned():
    state = PureState(ModeShape(2, 1), 2, {
        FockArray(((1,), (1,))): 1.0,
        FockArray(((2,), (0,))): 1e-16,
    })
    assert len(state) == 1


def test_basis_size():
    assert len(basis(ModeShape(2, 2), 2)) == 10
    assert len(list(compositions(3, 3))) == 10
    keys = basis(ModeShape(3, 1), 2)
    assert keys == sorted(keys)


def test_general_two_photon_matches_both_red():
    state = general_two_photon(2, (1, 0, 0, 0))
    assert state.terms == {FockArray(((1, 0), (1, 0))): 1}
    with pytest.raises(DimensionError):
        general_two_photon(2, (1, 0, 0))


def test_creation_expansion_double_occupation():
    out = creation_operator_expansion(ModeShape(1, 1), [{(0, 0): 1.0}, {(0, 0): 1.0}])
    assert out[FockArray(((2,),))] == pytest.approx(math.sqrt(2))


def test_full_overlap_is_indistinguishable(indistinguishable_pair):
    state = from_label_overlap(2, (1, 2), overlap_gram(1.0))
    assert state.shape.L == 1
    assert max_amplitude_difference(state, indistinguishable_pair) <= 1e-12


def test_zero_overlap_is_distinguishable(distinguishable_pair):
    state = from_label_overlap(2, (1, 2), overlap_gram(0.0))
    assert max_amplitude_difference(state, distinguishable_pair) <= 1e-12


@pytest.mark.parametrize("c", [0.6, 0.6j, -0.6])
def test_partial_overlap_coordinates(c):
    state = from_label_overlap(2, (1, 2), overlap_gram(c))
    assert state.amplitude(FockArray(((1, 0), (1, 0)))) == pytest.approx(c)
    assert state.amplitude(FockArray(((1, 0), (0, 1)))) == pytest.approx(0.8)


def test_overlap_out_of_range():
    with pytest.raises(ParameterError):
        overlap_gram(1.5)


def test_normalize_and_scale(indistinguishable_pair):
    doubled = scaled(indistinguishable_pair, 2.0)
    assert not doubled.normalized
    assert doubled.norm == pytest.approx(2.0)
    assert normalize(doubled).norm == pytest.approx(1.0)
    with pytest.raises(NormalizationError):
        normalize(scaled(indistinguishable_pair, 0.0))


def test_inner_product(distinguishable_pair):
    other = general_two_photon(2, (0, 0, 1, 0))
    assert inner_product(distinguishable_pair, distinguishable_pair) == pytest.approx(1)
    assert inner_product(distinguishable_pair, other) == 0


def test_phase_insensitive_comparison(distinguishable_pair):
    rotated = scaled(distinguishable_pair, np.exp(0.7j))
    assert max_amplitude_difference(rotated, distinguishable_pair) == pytest.approx(abs(np.exp(0.7j) - 1))
    assert max_amplitude_difference(rotated, distinguishable_pair, up_to_phase=True) <= 1e-12


def test_trim_and_pad_labels(indistinguishable_pair):
    padded = pad_labels(indistinguishable_pair, 3)
    assert padded.shape == ModeShape(2, 3)
    trimmed, used = trim_labels(padded)
    assert used == (0,)
    assert max_amplitude_difference(trimmed, indistinguishable_pair) == 0
    with pytest.raises(DimensionError):
        pad_labels(padded, 2)


def test_state_json_round_trip():
    state = partially_distinguishable(3, 0.6, 0.8j)
    restored = state_from_json(state_to_json(state))
    assert restored.normalized
    assert max_amplitude_difference(state, restored) == 0


def test_state_json_infers_unnormalized():
    data = {"shape": [2, 1], "n": 2, "terms": [{"occ": [[1], [1]], "re": 0.5, "im": 0.0}]}
    assert not state_from_json(data).normalized
