"""
Filter construction and multi-restart search over U(S) for determinant-zero filters
"""
import logging
import math
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import expm
from scipy.optimize import minimize

from config import search_config
from core.data_models import (
    DimensionError, FamilyParams, Interferometer, RestartOutcome, SearchObjective,
    SearchResult, SearchSpec, SimulationError
)
from core.evolve import interferometer_to_json
from core.fock import compositions
from core.kernels import determinant, permanent

logger = logging.getLogger(__name__)

SQRT2 = math.sqrt(2)


def canonical_filter() -> Interferometer:
    """Three-mode filter whose rows {2,3} x cols {1,2} block has zero determinant"""
    return Interferometer(0.5 * np.array([
        [SQRT2, SQRT2 * 1j, 0],
        [1j, 1, SQRT2 * 1j],
        [-1, 1j, SQRT2],
    ], dtype=complex))


def family_unitary(p: FamilyParams) -> Interferometer:
    """Continuous family of three-mode filters"""
    if p.degenerate:
        logger.warning(f"theta = {p.theta!r} is degenerate; the filter no longer passes the HOM test")
    c, s = math.cos(p.theta), math.sin(p.theta)
    a = np.exp(-1j * (p.phi + p.zeta))
    b = np.exp(1j * (p.xi - p.zeta))
    z = np.exp(1j * p.zeta)
    u = np.array([
        [-z, -1j * z, 0],
        [1j * a * c, a * c, -SQRT2 * np.exp(-1j * p.xi) * s],
        [1j * b * s, b * s, SQRT2 * np.exp(1j * p.phi) * c],
    ], dtype=complex) / SQRT2
    return Interferometer(u)


def matched_hom_angles(p: FamilyParams) -> Tuple[float, float]:
    """Beamsplitter (mixing, phase) on ports 2, 3 that sends a family member's
    postselected photons to port 3.

    The postselected photons share the single spatial mode
    (cos theta, e^{i(xi + phi)} sin theta) over ports 2 and 3.
    """
    return math.pi / 2 - p.theta, math.pi / 2 - (p.xi + p.phi)


def unitary_from_parameters(x: Sequence[float], S: int) -> np.ndarray:
    """U = expm(iH), H Hermitian from S^2 reals: diagonal, upper real parts, upper imaginary parts"""
    x = np.asarray(x, dtype=float)
    if x.shape != (S * S,):
        raise DimensionError(f"Expected {S * S} parameters, got {x.shape}")
    rows, cols = np.triu_indices(S, k=1)
    m = len(rows)
    h = np.diag(x[:S]).astype(complex)
    h[rows, cols] = x[S:S + m] + 1j * x[S + m:]
    h[cols, rows] = np.conj(h[rows, cols])
    return expm(1j * h)


def _target_block(u: np.ndarray, spec: SearchSpec) -> np.ndarray:
    rows = [p - 1 for p in spec.output_ports]
    cols = [p - 1 for p in spec.input_ports]
    return u[np.ix_(rows, cols)]


def _postselected_amplitudes(m: np.ndarray) -> Dict[Tuple[int, ...], complex]:
    """Output amplitudes of one photon per column landing in the rows of m"""
    n = m.shape[1]
    out = {}
    for counts in compositions(n, m.shape[0]):
        rows = [t for t, k in enumerate(counts) for _ in range(k)]
        norm = math.sqrt(math.prod(math.factorial(k) for k in counts))
        out[counts] = permanent(m[rows, :]) / norm
    return out


def filter_residual(u: np.ndarray, spec: SearchSpec) -> float:
    """Objective value of a candidate unitary; zero marks a perfect filter"""
    m = _target_block(np.asarray(u, dtype=complex), spec)
    det_sq = abs(determinant(m)) ** 2
    if spec.objective is SearchObjective.DET_ZERO:
        shortfall = max(0.0, spec.min_throughput - abs(permanent(m)) ** 2)
        return float(det_sq + shortfall ** 2)

    # fraction of the postselected weight the filter fails to remove
    amplitudes = _postselected_amplitudes(m)
    coincident = (1,) * len(spec.output_ports)
    total = sum(abs(a) ** 2 for a in amplitudes.values())
    noncoincident = total - abs(amplitudes.get(coincident, 0)) ** 2
    denominator = det_sq + total
    if denominator < 1e-30:
        return 1.0
    return float((det_sq + noncoincident) / denominator)


def _restart_generator(seed: int, restart: int) -> np.random.Generator:
    # counter-based stream per (seed, restart); order of execution does not matter
    return np.random.Generator(np.random.Philox(key=seed, counter=restart << 128))


def _run_restart(spec: SearchSpec, index: int) -> RestartOutcome:
    def objective(x):
        return filter_residual(unitary_from_parameters(x, spec.S), spec)

    rng = _restart_generator(spec.seed, index)
    x0 = rng.uniform(-math.pi, math.pi, spec.S * spec.S)
    simplex = minimize(
        objective, x0, method='Nelder-Mead',
        options=dict(maxiter=spec.max_iters, fatol=search_config.OPTIMIZER_FTOL,
                     xatol=1e-10, adaptive=True),
    )
    best_x, best_f, iterations = simplex.x, float(simplex.fun), int(simplex.nit)
    if best_f > spec.tolerance:
        polish = minimize(objective, best_x, method='BFGS',
                          options=dict(maxiter=search_config.POLISH_ITERS))
        iterations += int(polish.nit)
        if polish.fun < best_f:
            best_x, best_f = polish.x, float(polish.fun)
    return RestartOutcome(index=index, residual=best_f, iterations=iterations, parameters=best_x)


def residual_statistics(residuals: Sequence[float]) -> Dict[str, float]:
    values = np.asarray(residuals, dtype=float)
    if values.size == 0:
        return {}
    return {
        'min': float(np.min(values)),
        'median': float(np.median(values)),
        'max': float(np.max(values)),
        'mean': float(np.mean(values)),
    }


def search(spec: SearchSpec,
           on_restart: Optional[Callable[[RestartOutcome], None]] = None) -> SearchResult:
    """Seeded multi-restart simplex descent with a gradient polish.

    Non-convergence is reported through `converged`, never raised.
    """
    logger.info(
        f"Searching U({spec.S}) for {spec.objective.value}: inputs {spec.input_ports}, "
        f"outputs {spec.output_ports}, {spec.restarts} restarts, seed {spec.seed}"
    )
    outcomes: List[RestartOutcome] = []
    for index in range(spec.restarts):
        outcome = _run_restart(spec, index)
        logger.debug(f"Restart {index}: residual {outcome.residual:.3e} after {outcome.iterations} iterations")
        if on_restart is not None:
            on_restart(outcome)
        outcomes.append(outcome)

    # lowest residual wins, ties to the lowest restart index
    best = min(outcomes, key=lambda o: (o.residual, o.index))
    residuals = [o.residual for o in outcomes]
    result = SearchResult(
        best_unitary=unitary_from_parameters(best.parameters, spec.S),
        residual=best.residual,
        iterations=best.iterations,
        converged=best.residual <= spec.tolerance,
        best_restart=best.index,
        restart_residuals=residuals,
        statistics=residual_statistics(residuals),
    )
    logger.info(f"Best residual {result.residual:.3e} from restart {best.index} (converged: {result.converged})")
    return result


def search_spec_from_json(data: dict) -> SearchSpec:
    try:
        fields = {
            'S': int(data['S']),
            'input_ports': tuple(int(p) for p in data['input_ports']),
            'output_ports': tuple(int(p) for p in data['output_ports']),
        }
        if 'objective' in data:
            fields['objective'] = SearchObjective(data['objective'])
        for key, cast in (('restarts', int), ('seed', int), ('max_iters', int),
                          ('tolerance', float), ('min_throughput', float)):
            if key in data:
                fields[key] = cast(data[key])
    except SimulationError:
        raise
    except (KeyError, TypeError, ValueError) as e:
        raise SimulationError(f"Malformed search spec: {e}") from e
    return SearchSpec(**fields)


def search_spec_to_json(spec: SearchSpec) -> dict:
    return {
        'S': spec.S,
        'input_ports': list(spec.input_ports),
        'output_ports': list(spec.output_ports),
        'objective': spec.objective.value,
        'restarts': spec.restarts,
        'seed': spec.seed,
        'max_iters': spec.max_iters,
        'tolerance': spec.tolerance,
        'min_throughput': spec.min_throughput,
    }


def result_to_json(result: SearchResult) -> dict:
    return {
        'best_unitary': interferometer_to_json(Interferometer(result.best_unitary)),
        'residual': result.residual,
        'iterations': result.iterations,
        'converged': result.converged,
        'best_restart': result.best_restart,
        'restart_residuals': list(result.restart_residuals),
        'statistics': dict(result.statistics),
    }
