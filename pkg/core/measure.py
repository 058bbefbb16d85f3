"""
Label-blind detection, vacuum postselection, HOM tests and the classical routing model
"""
import logging
import math
import os
from collections import defaultdict
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from config import numerics_config, output_config
from core.data_models import (
    DimensionError, Interferometer, NormalizationError, ParameterError, PostselectionResult,
    PureState, SpatialPattern
)
from core.evolve import apply, embed_beamsplitter
from core.fock import compositions, from_label_overlap, normalize, overlap_gram

logger = logging.getLogger(__name__)

PatternLike = Union[SpatialPattern, Sequence[int]]
Evolver = Callable[[Interferometer, PureState], PureState]


def _pattern(p: PatternLike) -> SpatialPattern:
    return p if isinstance(p, SpatialPattern) else SpatialPattern(tuple(p))


def _port_index(S: int, port: int) -> int:
    if port < 1 or port > S:
        raise DimensionError(f"Port {port} out of range 1..{S}")
    return port - 1


def spatial_probability(state: PureState, pattern: PatternLike) -> float:
    """Sum of |amplitude|^2 over every Fock array whose row sums equal the pattern"""
    pattern = _pattern(pattern)
    if len(pattern.counts) != state.shape.S:
        raise DimensionError(f"Pattern has {len(pattern.counts)} ports, state has S={state.shape.S}")
    if pattern.n != state.n:
        raise DimensionError(f"Pattern holds {pattern.n} photons, state has N={state.n}")
    return float(sum(
        abs(amp) ** 2 for key, amp in state.terms.items() if key.row_sums() == pattern.counts
    ))


def pattern_distribution(state: PureState) -> Dict[SpatialPattern, float]:
    """Probability of every spatial pattern, including the zero ones"""
    weights: Dict[Tuple[int, ...], float] = defaultdict(float)
    for key, amp in state.terms.items():
        weights[key.row_sums()] += abs(amp) ** 2
    return {
        SpatialPattern(counts): float(weights.get(counts, 0.0))
        for counts in compositions(state.n, state.shape.S)
    }


def port_occupation_probability(state: PureState, port: int) -> float:
    """Probability of at least one photon in the port"""
    idx = _port_index(state.shape.S, port)
    return float(sum(abs(amp) ** 2 for key, amp in state.terms.items() if key.row_sums()[idx] > 0))


def postselect_vacuum(state: PureState, port: int) -> PostselectionResult:
    """Keep the terms with an empty port and renormalize them.

    The probability is relative to the input's squared norm, so unnormalized
    inputs are handled too. A zero-probability outcome has no conditional state.
    """
    idx = _port_index(state.shape.S, port)
    kept = {key: amp for key, amp in state.terms.items() if not any(key.occ[idx])}
    unnormalized = PureState(state.shape, state.n, kept, normalized=False)
    total = state.norm ** 2
    probability = unnormalized.norm ** 2 / total if total > 0 else 0.0
    if probability < numerics_config.PRUNE_TOL ** 2 or not unnormalized.terms:
        logger.warning(f"Postselecting vacuum in port {port} has probability zero")
        return PostselectionResult(port, 0.0, None, unnormalized)
    logger.debug(f"Vacuum in port {port} with probability {probability:.6f}")
    return PostselectionResult(port, float(probability), normalize(unnormalized), unnormalized)


def postselected_filter_probability(alpha: complex, beta: complex) -> float:
    """Closed form for the canonical filter acting on alpha|RR> + beta|RG>"""
    return 0.5 * (1 - abs(beta) ** 2 / 2)


def coincidence_pattern(S: int, port_a: int, port_b: int) -> SpatialPattern:
    a, b = _port_index(S, port_a), _port_index(S, port_b)
    if a == b:
        raise DimensionError("Coincidence ports must be distinct")
    counts = [0] * S
    counts[a] = counts[b] = 1
    return SpatialPattern(tuple(counts))


def hom_coincidence(state: PureState, port_a: int, port_b: int,
                    mixing: float = math.pi / 4, phase: Optional[float] = None,
                    evolve: Evolver = apply) -> float:
    """Coincidence probability after a beamsplitter between the two ports"""
    if state.n != 2:
        raise DimensionError(f"HOM coincidence is defined for N = 2, got N = {state.n}")
    weight = state.norm ** 2
    if weight <= numerics_config.NORM_TOL:
        raise NormalizationError("HOM coincidence of a state with zero norm")
    pattern = coincidence_pattern(state.shape.S, port_a, port_b)
    out = evolve(embed_beamsplitter(state.shape.S, port_a, port_b, mixing, phase), state)
    return spatial_probability(out, pattern) / weight


def dip_curve(S: int, interferometer: Optional[Interferometer], overlap_grid: Sequence[float],
              port_a: int = 1, port_b: int = 2, evolve: Evolver = apply) -> List[Tuple[float, float]]:
    """HOM coincidence as a function of the Label overlap of two photons.

    `evolve` replaces `apply` for every evolution, e.g. with an oracle-checked one.
    """
    grid = [float(c) for c in overlap_grid]
    if not grid:
        raise ParameterError("Overlap grid is empty")
    bad = [c for c in grid if not 0.0 <= c <= 1.0]
    if bad:
        raise ParameterError(f"Overlaps must lie in [0, 1], got {bad}")
    curve = []
    for c in grid:
        state = from_label_overlap(S, (port_a, port_b), overlap_gram(c))
        if interferometer is not None:
            state = evolve(interferometer, state)
        coincidence = hom_coincidence(state, port_a, port_b, evolve=evolve)
        logger.debug(f"overlap {c!r}: coincidence {coincidence!r}")
        curve.append((c, coincidence))
    return curve


def dip_curve_frame(curve: Sequence[Tuple[float, float]]) -> pd.DataFrame:
    return pd.DataFrame(list(curve), columns=['overlap', 'coincidence'])


def write_dip_csv(curve: Sequence[Tuple[float, float]], path: str) -> str:
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    float_format = f"%.{output_config.SIGNIFICANT_DIGITS}g"
    dip_curve_frame(curve).to_csv(path, index=False, float_format=float_format)
    logger.info(f"Wrote {len(curve)} dip points to {path}")
    return path


def _route(u: np.ndarray, occupied: Dict[Tuple[int, ...], float], sources: Sequence[int]) -> Dict[Tuple[int, ...], float]:
    """Send one classical ball per source through |u[t, s]|^2, accumulating count tuples"""
    weights = np.abs(u) ** 2
    dist = dict(occupied)
    for s in sources:
        step: Dict[Tuple[int, ...], float] = defaultdict(float)
        for counts, p in dist.items():
            for t in range(u.shape[0]):
                w = weights[t, s]
                if w == 0:
                    continue
                moved = list(counts)
                moved[t] += 1
                step[tuple(moved)] += p * w
        dist = dict(step)
    return dist


def _classical_sources(S: int, input_ports: Sequence[int]) -> List[int]:
    ports = [int(p) for p in input_ports]
    if len(set(ports)) != len(ports):
        raise DimensionError(f"Repeated input port in {ports}")
    return [_port_index(S, p) for p in ports]


def _check_pattern(S: int, n: int, pattern: SpatialPattern):
    if len(pattern.counts) != S or pattern.n != n:
        raise DimensionError(f"Pattern {pattern.counts} does not fit S={S}, N={n}")


def classical_distribution(intf: Interferometer, input_ports: Sequence[int]) -> Dict[Tuple[int, ...], float]:
    """Distinguishable-particle output pattern probabilities"""
    sources = _classical_sources(intf.dim, input_ports)
    return _route(intf.u, {(0,) * intf.dim: 1.0}, sources)


def classical_prediction(intf: Interferometer, input_ports: Sequence[int], pattern: PatternLike,
                         postselect_vacuum_port: Optional[int] = None) -> float:
    """Probability of a pattern for independently routed photons.

    With a postselection port the result is conditioned on that port being empty.
    """
    pattern = _pattern(pattern)
    _check_pattern(intf.dim, len(input_ports), pattern)
    dist = classical_distribution(intf, input_ports)
    probability = dist.get(pattern.counts, 0.0)
    if postselect_vacuum_port is None:
        return float(probability)
    idx = _port_index(intf.dim, postselect_vacuum_port)
    if pattern.counts[idx]:
        return 0.0
    kept = sum(p for counts, p in dist.items() if counts[idx] == 0)
    if kept == 0:
        logger.warning(f"Classical vacuum in port {postselect_vacuum_port} never occurs")
        return 0.0
    return float(probability / kept)


def classical_cascade_prediction(stages: Sequence[Interferometer], input_ports: Sequence[int],
                                 pattern: PatternLike, via: Optional[PatternLike] = None) -> float:
    """Route photons classically stage after stage.

    `via` keeps only the histories whose pattern after the first stage equals it,
    giving the joint probability of that intermediate pattern and the final one.
    """
    if not stages:
        raise DimensionError("At least one stage is required")
    S = stages[0].dim
    if any(stage.dim != S for stage in stages):
        raise DimensionError("Stages act on different mode counts")
    pattern = _pattern(pattern)
    _check_pattern(S, len(input_ports), pattern)

    dist = _route(stages[0].u, {(0,) * S: 1.0}, _classical_sources(S, input_ports))
    if via is not None:
        via = _pattern(via)
        _check_pattern(S, len(input_ports), via)
        dist = {via.counts: dist.get(via.counts, 0.0)}
    for stage in stages[1:]:
        routed: Dict[Tuple[int, ...], float] = defaultdict(float)
        for counts, p in dist.items():
            sources = [t for t, k in enumerate(counts) for _ in range(k)]
            for final, q in _route(stage.u, {(0,) * S: p}, sources).items():
                routed[final] += q
        dist = dict(routed)
    return float(dist.get(pattern.counts, 0.0))
