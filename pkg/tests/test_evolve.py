import math

import numpy as np
import pytest

from core.data_models import (
    DimensionError, FockArray, Interferometer, ModeShape, NotUnitaryError, PureState, SizeBoundError
)
from core.evolve import (
    apply, beamsplitter_block, compose, dagger, embed, embed_beamsplitter, identity,
    interferometer_from_json, interferometer_to_json, symbolic_apply, two_photon_representation
)
from core.fock import basis, fock_indistinguishable, max_amplitude_difference
from tests.conftest import random_unitary


def _random_state(gen, S, L, n):
    keys = basis(ModeShape(S, L), n)
    picked = gen.choice(len(keys), size=min(len(keys), 6), replace=False)
    amps = gen.normal(size=len(picked)) + 1j * gen.normal(size=len(picked))
    amps /= np.linalg.norm(amps)
    return PureState(ModeShape(S, L), n, {keys[i]: a for i, a in zip(picked, amps)})


def test_beamsplitter_bunches_indistinguishable_pair(balanced_b, indistinguishable_pair):
    out = apply(balanced_b, indistinguishable_pair)
    assert out.amplitude(FockArray(((2,), (0,)))) == pytest.approx(1j / math.sqrt(2))
    assert out.amplitude(FockArray(((0,), (2,)))) == pytest.approx(1j / math.sqrt(2))
    assert abs(out.amplitude(FockArray(((1,), (1,))))) <= 1e-15


def test_beamsplitter_on_distinguishable_pair(balanced_b, distinguishable_pair):
    out = apply(balanced_b, distinguishable_pair)
    expected = {
        ((1, 1), (0, 0)): 0.5j,
        ((1, 0), (0, 1)): 0.5,
        ((0, 1), (1, 0)): -0.5,
        ((0, 0), (1, 1)): 0.5j,
    }
    for occ, amp in expected.items():
        assert out.amplitude(FockArray(occ)) == pytest.approx(amp)
    assert len(out) == 4


def test_apply_matches_operator_expansion():
    gen = np.random.default_rng(2024)
    shapes = [(2, 1), (3, 1), (2, 2), (3, 2), (2, 3)]
    for trial in range(100):
        S, L = shapes[trial % len(shapes)]
        n = 1 + trial % 3
        u = Interferometer(random_unitary(S, seed=trial))
        state = _random_state(gen, S, L, n)
        assert max_amplitude_difference(apply(u, state), symbolic_apply(u, state)) <= 1e-10


def test_apply_preserves_norm():
    gen = np.random.default_rng(7)
    state = _random_state(gen, 3, 2, 3)
    out = apply(Interferometer(random_unitary(3, seed=1)), state)
    assert out.norm == pytest.approx(1.0, abs=1e-12)


def test_dagger_undoes_apply():
    gen = np.random.default_rng(8)
    state = _random_state(gen, 3, 2, 2)
    u = Interferometer(random_unitary(3, seed=2))
    back = apply(dagger(u), apply(u, state))
    assert max_amplitude_difference(back, state) <= 1e-12


def test_identity_is_trivial():
    state = fock_indistinguishable(3, (1, 3))
    assert max_amplitude_difference(apply(identity(3), state), state) == 0


def test_compose_gives_combined_filter(filter_u, b23):
    combined = compose(b23, filter_u)
    expected = np.array([[1, 1j, 0], [0, 0, math.sqrt(2) * 1j], [-1, 1j, 0]]) / math.sqrt(2)
    np.testing.assert_allclose(combined.u, expected, atol=1e-12)


def test_compose_dimension_mismatch():
    with pytest.raises(DimensionError):
        compose(identity(2), identity(3))


def test_embed_validation():
    with pytest.raises(DimensionError):
        embed(3, (1, 1), np.eye(2))
    with pytest.raises(DimensionError):
        embed(3, (1, 4), np.eye(2))
    with pytest.raises(DimensionError):
        embed(3, (1, 2), np.eye(3))


def test_beamsplitter_knobs():
    assert np.allclose(beamsplitter_block(0.0), np.eye(2))
    swap = embed_beamsplitter(2, 1, 2, mixing=math.pi / 2, phase=-math.pi / 2)
    np.testing.assert_allclose(swap.u, [[0, 1], [-1, 0]], atol=1e-15)


def test_non_unitary_rejected():
    with pytest.raises(NotUnitaryError):
        Interferometer(2 * np.eye(2))
    with pytest.raises(DimensionError):
        Interferometer(np.ones((2, 3)))


def test_state_dimension_mismatch(indistinguishable_pair):
    with pytest.raises(DimensionError):
        apply(identity(3), indistinguishable_pair)


def test_size_bounds():
    with pytest.raises(SizeBoundError):
        apply(identity(7), fock_indistinguishable(7, range(1, 8)))
    with pytest.raises(SizeBoundError):
        symbolic_apply(identity(5), fock_indistinguishable(5, range(1, 6)))


def test_two_photon_representation_is_unitary():
    sym_rep, anti_rep = two_photon_representation(Interferometer(random_unitary(3, seed=4)))
    assert sym_rep.shape == (6, 6)
    assert anti_rep.shape == (3, 3)
    np.testing.assert_allclose(sym_rep.conj().T @ sym_rep, np.eye(6), atol=1e-12)
    np.testing.assert_allclose(anti_rep.conj().T @ anti_rep, np.eye(3), atol=1e-12)


def test_two_photon_representation_matches_apply():
    u = Interferometer(random_unitary(3, seed=6))
    sym_rep, _ = two_photon_representation(u)
    out = apply(u, fock_indistinguishable(3, (1, 2)))
    pairs = [(x, y) for x in range(3) for y in range(x, 3)]
    column = pairs.index((0, 1))
    for row, (x, y) in enumerate(pairs):
        occ = [[0], [0], [0]]
        occ[x][0] += 1
        occ[y][0] += 1
        assert out.amplitude(FockArray.from_rows(occ)) == pytest.approx(sym_rep[row, column], abs=1e-12)


def test_antisymmetric_representation_of_two_modes():
    u = Interferometer(random_unitary(2, seed=9))
    _, anti_rep = two_photon_representation(u)
    assert anti_rep[0, 0] == pytest.approx(np.linalg.det(u.u))


def test_interferometer_json_round_trip(filter_u):
    restored = interferometer_from_json(interferometer_to_json(filter_u))
    np.testing.assert_array_equal(restored.u, filter_u.u)
    with pytest.raises(DimensionError):
        interferometer_from_json({"dim": 2, "re": [[1, 0, 0]], "im": [[0, 0, 0]]})
