"""
Second-quantized states over System x Label modes
"""
import logging
import math
from collections import defaultdict
from itertools import product
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from config import numerics_config
from core.data_models import (
    DimensionError, FockArray, LabelGram, ModeShape, NormalizationError,
    ParameterError, PureState, SimulationError, SizeBoundError
)

logger = logging.getLogger(__name__)

# (system, label) -> coefficient, both 0-based
CreationFactor = Mapping[Tuple[int, int], complex]


def compositions(n: int, parts: int) -> Iterator[Tuple[int, ...]]:
    """All ways to place n identical items into `parts` ordered bins"""
    if parts == 1:
        yield (n,)
        return
    for first in range(n, -1, -1):
        for rest in compositions(n - first, parts - 1):
            yield (first,) + rest


def basis(shape: ModeShape, n: int) -> List[FockArray]:
    """Every Fock array of the given shape with n photons, in canonical order"""
    cells = shape.S * shape.L
    arrays = [
        FockArray(tuple(tuple(flat[s * shape.L:(s + 1) * shape.L]) for s in range(shape.S)))
        for flat in compositions(n, cells)
    ]
    return sorted(arrays)


def _check_modes(S: int, modes: Sequence[int]) -> List[int]:
    modes = [int(m) for m in modes]
    if not modes:
        raise DimensionError("At least one photon is required")
    if len(set(modes)) != len(modes):
        raise DimensionError(f"Repeated System mode in {modes}; inputs must be collision-free")
    if any(m < 1 or m > S for m in modes):
        raise DimensionError(f"System mode out of range 1..{S}: {modes}")
    return [m - 1 for m in modes]


def _array(shape: ModeShape, photons: Sequence[Tuple[int, int]]) -> FockArray:
    grid = [[0] * shape.L for _ in range(shape.S)]
    for s, l in photons:
        grid[s][l] += 1
    return FockArray.from_rows(grid)


def fock_indistinguishable(S: int, modes: Sequence[int]) -> PureState:
    """One photon of Label 1 in each listed System mode (1-based)"""
    rows = _check_modes(S, modes)
    shape = ModeShape(S, 1)
    return PureState(shape, len(rows), {_array(shape, [(s, 0) for s in rows]): 1.0})


def fock_distinguishable(S: int, modes: Sequence[int]) -> PureState:
    """Photon i in listed mode i carries its own orthogonal Label i"""
    rows = _check_modes(S, modes)
    shape = ModeShape(S, len(rows))
    return PureState(shape, len(rows), {_array(shape, [(s, i) for i, s in enumerate(rows)]): 1.0})


def _check_normalized(amplitudes: Sequence[complex]):
    total = sum(abs(a) ** 2 for a in amplitudes)
    if abs(total - 1.0) > numerics_config.NORM_TOL:
        raise NormalizationError(f"Squared amplitudes sum to {total!r}, expected 1")


def partially_distinguishable(S: int, alpha: complex, beta: complex) -> PureState:
    """alpha |both Label R> + beta |mode-2 photon Label G>, photons in modes 1 and 2"""
    if S < 2:
        raise DimensionError("Two System modes are needed for a two-photon input")
    _check_normalized((alpha, beta))
    shape = ModeShape(S, 2)
    terms = {
        _array(shape, [(0, 0), (1, 0)]): alpha,
        _array(shape, [(0, 0), (1, 1)]): beta,
    }
    return PureState(shape, 2, terms)


def general_two_photon(S: int, amplitudes: Sequence[complex]) -> PureState:
    """Photons in modes 1 and 2 with Labels (R,R), (R,G), (G,R), (G,G)"""
    if S < 2:
        raise DimensionError("Two System modes are needed for a two-photon input")
    if len(amplitudes) != 4:
        raise DimensionError("Expected four amplitudes for RR, RG, GR, GG")
    _check_normalized(amplitudes)
    shape = ModeShape(S, 2)
    labels = [(0, 0), (0, 1), (1, 0), (1, 1)]
    terms = {
        _array(shape, [(0, la), (1, lb)]): amp
        for (la, lb), amp in zip(labels, amplitudes)
    }
    return PureState(shape, 2, terms)


def creation_operator_expansion(shape: ModeShape, factors: Sequence[CreationFactor]) -> Dict[FockArray, complex]:
    """Expand prod_i (sum_m c_im a^dag_m) |vac> monomial by monomial.

    A monomial with occupations k contributes prod(c) * sqrt(prod k!) to |k>.
    Cost is the product of the factor sizes.
    """
    out: Dict[FockArray, complex] = defaultdict(complex)
    items = [list(f.items()) for f in factors]
    for choice in product(*items):
        coeff = 1 + 0j
        grid = [[0] * shape.L for _ in range(shape.S)]
        for (s, l), c in choice:
            coeff *= c
            grid[s][l] += 1
        if coeff == 0:
            continue
        weight = math.sqrt(math.prod(math.factorial(k) for row in grid for k in row))
        out[FockArray.from_rows(grid)] += coeff * weight
    return dict(out)


def _psd_cholesky(g: np.ndarray) -> np.ndarray:
    """Lower-triangular L with g = L L^dagger, tolerating rank deficiency"""
    # numpy.linalg.cholesky rejects singular PSD matrices such as overlap 1; zero pivots drop a column
    k = g.shape[0]
    lower = np.zeros_like(g, dtype=complex)
    for j in range(k):
        d = g[j, j].real - np.sum(np.abs(lower[j, :j]) ** 2)
        if d <= numerics_config.NORM_TOL:
            continue
        lower[j, j] = math.sqrt(d)
        for i in range(j + 1, k):
            lower[i, j] = (g[i, j] - np.sum(lower[i, :j] * lower[j, :j].conj())) / lower[j, j]
    return lower


def from_label_overlap(S: int, modes: Sequence[int], gram: LabelGram) -> PureState:
    """Photons with non-orthogonal Label wavefunctions, re-expressed in an orthonormal Label basis.

    The basis comes from a Cholesky factor of the Gram matrix, photon 1's Label first.
    """
    rows = _check_modes(S, modes)
    if gram.k != len(rows):
        raise DimensionError(f"Gram matrix is {gram.k}x{gram.k} for {len(rows)} photons")
    if gram.k > 2:
        raise SizeBoundError("Label overlap ingestion supports at most two photons")
    lower = _psd_cholesky(gram.g)
    keep = [a for a in range(gram.k) if np.any(np.abs(lower[:, a]) > numerics_config.NORM_TOL)]
    # photon j's Label has coordinates conj(L[j, a]) in the orthonormal basis
    vectors = lower[:, keep].conj()
    shape = ModeShape(S, len(keep))
    factors = [
        {(s, a): vectors[j, a] for a in range(len(keep)) if abs(vectors[j, a]) > 0}
        for j, s in enumerate(rows)
    ]
    return PureState(shape, len(rows), creation_operator_expansion(shape, factors))


def overlap_gram(c: complex) -> LabelGram:
    """Two-photon Gram matrix with overlap <f1|f2> = c"""
    if abs(c) > 1 + numerics_config.NORM_TOL:
        raise ParameterError(f"Overlap magnitude {abs(c)!r} exceeds 1")
    return LabelGram(np.array([[1.0, c], [np.conj(c), 1.0]], dtype=complex))


def norm(state: PureState) -> float:
    return state.norm


def normalize(state: PureState) -> PureState:
    if state.norm < numerics_config.PRUNE_TOL:
        raise NormalizationError("Cannot normalize a zero-norm state")
    return PureState(
        state.shape, state.n,
        {key: amp / state.norm for key, amp in state.terms.items()},
        normalized=True,
    )


def scaled(state: PureState, factor: complex) -> PureState:
    """Multiply every amplitude; result flagged unnormalized"""
    return PureState(
        state.shape, state.n,
        {key: amp * factor for key, amp in state.terms.items()},
        normalized=False,
    )


def inner_product(a: PureState, b: PureState) -> complex:
    """<a|b>"""
    if a.shape != b.shape or a.n != b.n:
        raise DimensionError("States live in different spaces")
    return complex(sum(amp.conjugate() * b.amplitude(key) for key, amp in a.terms.items()))


def max_amplitude_difference(a: PureState, b: PureState, up_to_phase: bool = False) -> float:
    """Largest per-amplitude deviation, optionally after aligning the global phase"""
    if a.shape != b.shape or a.n != b.n:
        raise DimensionError("States live in different spaces")
    phase = 1 + 0j
    if up_to_phase:
        overlap = inner_product(b, a)
        if abs(overlap) > 0:
            phase = overlap / abs(overlap)
    keys = set(a.terms) | set(b.terms)
    if not keys:
        return 0.0
    return max(abs(a.amplitude(k) - phase * b.amplitude(k)) for k in keys)


def trim_labels(state: PureState) -> Tuple[PureState, Tuple[int, ...]]:
    """Drop Label columns empty in every term; returns the state and the kept columns"""
    used = sorted({l for key in state.terms for l in range(state.shape.L) if any(key.column(l))})
    if not used:
        raise SimulationError("State has no occupied Label")
    shape = ModeShape(state.shape.S, len(used))
    terms = {
        FockArray(tuple(tuple(row[l] for l in used) for row in key.occ)): amp
        for key, amp in state.terms.items()
    }
    return PureState(shape, state.n, terms, normalized=state.normalized), tuple(used)


def pad_labels(state: PureState, L: int) -> PureState:
    """Append empty Label columns up to L"""
    if L < state.shape.L:
        raise DimensionError(f"Cannot pad {state.shape.L} Labels down to {L}")
    extra = (0,) * (L - state.shape.L)
    terms = {
        FockArray(tuple(row + extra for row in key.occ)): amp
        for key, amp in state.terms.items()
    }
    return PureState(ModeShape(state.shape.S, L), state.n, terms, normalized=state.normalized)


def state_to_json(state: PureState) -> dict:
    return {
        "shape": [state.shape.S, state.shape.L],
        "n": state.n,
        "terms": [
            {"occ": [list(row) for row in key.occ], "re": amp.real, "im": amp.imag}
            for key, amp in state.terms.items()
        ],
    }


def state_from_json(data: dict, normalized: Optional[bool] = None) -> PureState:
    """Parse the JSON form; the normalized flag is inferred from the norm unless given"""
    try:
        S, L = (int(x) for x in data["shape"])
        n = int(data["n"])
        terms: Dict[FockArray, complex] = defaultdict(complex)
        for term in data["terms"]:
            terms[FockArray.from_rows(term["occ"])] += complex(float(term["re"]), float(term.get("im", 0.0)))
    except (KeyError, TypeError, ValueError) as e:
        raise SimulationError(f"Malformed state JSON: {e}") from e
    if normalized is None:
        total = math.sqrt(sum(abs(a) ** 2 for a in terms.values()))
        normalized = abs(total - 1.0) <= numerics_config.NORM_TOL
    return PureState(ModeShape(S, L), n, dict(terms), normalized=normalized)
