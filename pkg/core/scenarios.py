"""
Named scenarios: build inputs, run the pipelines, compare against known values
"""
import logging
import math
import os
from dataclasses import asdict
from typing import Any, Callable, List, Optional, Sequence

import numpy as np

from config import output_config
from core.data_models import (
    Check, FamilyParams, FockArray, Interferometer, ModeShape, OracleMismatchError,
    PureState, RestartOutcome, ScenarioReport, SearchObjective, SearchSpec, SimulationError
)
from core.duality import (
    decompose, decomposition_to_json, first_quantize, reconstruct, schmidt_rank, singlet_weight,
    system_vector
)
from core.evolve import apply, compose, embed_beamsplitter, symbolic_apply
from core.fock import (
    fock_distinguishable, fock_indistinguishable, max_amplitude_difference,
    normalize, partially_distinguishable, state_to_json
)
from core.kernels import determinant, submatrix
from core.measure import (
    Evolver, classical_cascade_prediction, classical_prediction, dip_curve, hom_coincidence,
    pattern_distribution, port_occupation_probability, postselect_vacuum,
    postselected_filter_probability, write_dip_csv
)
from core.search import (
    canonical_filter, family_unitary, matched_hom_angles, result_to_json, search,
    search_spec_to_json
)

logger = logging.getLogger(__name__)

EXACT_TOL = 1e-12
PROBABILITY_TOL = 1e-10
SCENARIOS = ('hom', 'filter', 'schmidt', 'family', 'search')
PRESETS = ('indistinguishable', 'distinguishable', 'filtered')
FAMILY_THETAS = (math.pi / 8, math.pi / 4, 3 * math.pi / 8)
FAMILY_BETAS = (0.0, 0.5, 1.0)


def default_grid(points: int = None) -> List[float]:
    points = output_config.DEFAULT_GRID_POINTS if points is None else points
    return [float(c) for c in np.linspace(0.0, 1.0, points)]


def combined_filter_matrix() -> np.ndarray:
    """Filter followed by the balanced beamsplitter on ports 2 and 3"""
    return np.array([
        [1, 1j, 0],
        [0, 0, math.sqrt(2) * 1j],
        [-1, 1j, 0],
    ], dtype=complex) / math.sqrt(2)


def expected_filter_output(alpha: complex, beta: complex) -> PureState:
    """Unnormalized state left after the filter with port 1 found empty"""
    r2 = 2 * math.sqrt(2)
    rows = {
        ((0, 0), (2, 0), (0, 0)): 1j * alpha / r2,
        ((0, 0), (1, 0), (1, 0)): -alpha / 2,
        ((0, 0), (0, 0), (2, 0)): -1j * alpha / r2,
        ((0, 0), (1, 1), (0, 0)): 1j * beta / 4,
        ((0, 0), (1, 0), (0, 1)): -beta / 4,
        ((0, 0), (0, 1), (1, 0)): -beta / 4,
        ((0, 0), (0, 0), (1, 1)): -1j * beta / 4,
    }
    terms = {FockArray(occ): amp for occ, amp in rows.items()}
    return PureState(ModeShape(3, 2), 2, terms, normalized=False)


def system_vector_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Largest entry difference between two unit vectors after aligning their global phase"""
    overlap = np.vdot(b, a)
    if abs(overlap) > 0:
        b = b * (overlap / abs(overlap))
    return float(np.max(np.abs(a - b)))


def _jsonable(value: Any) -> Any:
    if isinstance(value, complex):
        return {'re': value.real, 'im': value.imag}
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, np.complexfloating):
        return _jsonable(complex(value))
    if isinstance(value, np.ndarray):
        return _jsonable(value.tolist())
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def report_to_json(report: ScenarioReport) -> dict:
    return {
        'scenario': report.scenario,
        'passed': report.passed,
        'inputs': _jsonable(report.inputs),
        'quantities': _jsonable(report.quantities),
        'checks': [_jsonable(asdict(check)) for check in report.checks],
    }


class ScenarioRunner:
    """Runs named scenarios, optionally re-deriving every evolution by operator expansion"""

    def __init__(self, oracle: bool = False, out_dir: Optional[str] = None):
        self.oracle = oracle
        self.out_dir = out_dir
        self.oracle_comparisons = 0

    def evolve(self, intf: Interferometer, state: PureState) -> PureState:
        out = apply(intf, state)
        if self.oracle:
            reference = symbolic_apply(intf, state)
            diff = max_amplitude_difference(out, reference)
            self.oracle_comparisons += 1
            if diff > PROBABILITY_TOL:
                raise OracleMismatchError(
                    f"Permanent evolution differs from operator expansion by {diff:.3e}"
                )
            logger.debug(f"Oracle agrees to {diff:.3e}")
        return out

    def coincidence(self, state: PureState, port_a: int, port_b: int,
                    mixing: float = math.pi / 4, phase: Optional[float] = None) -> float:
        return hom_coincidence(state, port_a, port_b, mixing, phase, evolve=self.evolve)

    @staticmethod
    def _check(report: ScenarioReport, name: str, value: float, expected: float,
               tolerance: float, note: str = ""):
        passed = bool(abs(value - expected) <= tolerance)
        report.checks.append(Check(name, value, expected, tolerance, passed, note))
        if not passed:
            logger.warning(f"{report.scenario}: check {name} failed ({value!r} vs {expected!r})")

    @staticmethod
    def _check_at_most(report: ScenarioReport, name: str, value: float, bound: float, note: str = ""):
        passed = bool(value <= bound)
        report.checks.append(Check(name, value, 0.0, bound, passed, note))
        if not passed:
            logger.warning(f"{report.scenario}: check {name} failed ({value!r} > {bound!r})")

    def _filter_pipeline(self, intf: Interferometer, alpha: complex, beta: complex):
        state = partially_distinguishable(3, alpha, beta)
        return state, postselect_vacuum(self.evolve(intf, state), 1)

    def run_hom(self, grid: Optional[Sequence[float]] = None) -> ScenarioReport:
        """HOM dip against Label overlap, with the canonical endpoints"""
        grid = default_grid() if grid is None else [float(c) for c in grid]
        report = ScenarioReport('hom', inputs={'grid': grid})
        curve = dip_curve(2, None, grid, evolve=self.evolve)
        for c, coincidence in curve:
            self._check(report, f"coincidence at overlap {c!r}", coincidence, (1 - c * c) / 2, PROBABILITY_TOL)

        report.quantities['curve'] = [{'overlap': c, 'coincidence': v} for c, v in curve]
        values = [v for _, v in sorted(curve)]
        monotone = all(b <= a + EXACT_TOL for a, b in zip(values, values[1:]))
        report.checks.append(Check('monotone in overlap', monotone, True, EXACT_TOL, monotone))

        self._check_at_most(report, 'indistinguishable pair coincidence',
                            self.coincidence(fock_indistinguishable(2, (1, 2)), 1, 2), EXACT_TOL)
        self._check(report, 'distinguishable pair coincidence',
                    self.coincidence(fock_distinguishable(2, (1, 2)), 1, 2), 0.5, PROBABILITY_TOL)

        if self.out_dir:
            report.quantities['csv'] = write_dip_csv(curve, os.path.join(self.out_dir, 'hom_dip.csv'))
        return report

    def run_filter(self, alpha: complex, beta: complex,
                   beta_grid: Optional[Sequence[float]] = None) -> ScenarioReport:
        """Filter, postselect port 1, then HOM on ports 2 and 3; classical figures alongside"""
        report = ScenarioReport('filter', inputs={'alpha': complex(alpha), 'beta': complex(beta)})
        u = canonical_filter()
        state, outcome = self._filter_pipeline(u, alpha, beta)
        expected_probability = postselected_filter_probability(alpha, beta)
        report.quantities['postselection_probability'] = outcome.probability
        self._check(report, 'postselection probability', outcome.probability,
                    expected_probability, PROBABILITY_TOL)
        if outcome.is_empty:
            return report

        conditional = outcome.conditional_state
        expected = normalize(expected_filter_output(alpha, beta))
        self._check_at_most(report, 'conditional state up to phase',
                            max_amplitude_difference(conditional, expected, up_to_phase=True), PROBABILITY_TOL)
        weight = singlet_weight(conditional)
        report.quantities['conditional_state'] = state_to_json(conditional)
        report.quantities['singlet_weight'] = weight
        self._check_at_most(report, 'conditional singlet weight', weight, EXACT_TOL)
        coincidence = self.coincidence(conditional, 2, 3)
        report.quantities['hom_coincidence'] = coincidence
        self._check_at_most(report, 'HOM coincidence after filter', coincidence, EXACT_TOL)

        # only the Label factor of the conditional state depends on beta
        reference = system_vector(conditional)
        betas = [float(b) for b in (np.linspace(0.0, 1.0, 11) if beta_grid is None else beta_grid)]
        spread, worst, ranks = 0.0, 0.0, set()
        for b in betas:
            _, sweep = self._filter_pipeline(u, math.sqrt(1 - b * b), b)
            self._check(report, f"postselection probability at beta {b!r}", sweep.probability,
                        postselected_filter_probability(math.sqrt(1 - b * b), b), PROBABILITY_TOL)
            ranks.add(schmidt_rank(sweep.conditional_state))
            spread = max(spread, system_vector_distance(system_vector(sweep.conditional_state), reference))
            worst = max(worst, self.coincidence(sweep.conditional_state, 2, 3))
        report.quantities['schmidt_ranks_over_beta'] = sorted(ranks)
        self._check(report, 'product state over beta grid', float(ranks == {1}), 1.0, 0)
        self._check_at_most(report, 'System factor independent of beta', spread, PROBABILITY_TOL)
        self._check_at_most(report, 'HOM coincidence over beta grid', worst, EXACT_TOL)

        b23 = embed_beamsplitter(3, 2, 3)
        combined = compose(b23, u)
        self._check_at_most(report, 'combined matrix entries',
                            float(np.max(np.abs(combined.u - combined_filter_matrix()))), EXACT_TOL)
        port2 = port_occupation_probability(self.evolve(combined, state), 2)
        report.quantities['quantum_port2_probability'] = port2
        self._check_at_most(report, 'no photons in output port 2', port2, EXACT_TOL)

        # classical balls through the same optics
        filter_stage = classical_prediction(u, (1, 2), (0, 1, 1))
        staged = classical_cascade_prediction([u, b23], (1, 2), (0, 1, 1), via=(0, 1, 1))
        report.quantities['classical'] = {
            'filter_coincidence': filter_stage,
            'filter_coincidence_postselected': classical_prediction(u, (1, 2), (0, 1, 1), postselect_vacuum_port=1),
            'staged_coincidence': staged,
            'cascade_coincidence': classical_cascade_prediction([u, b23], (1, 2), (0, 1, 1)),
            'combined_coincidence': classical_prediction(combined, (1, 2), (0, 1, 1)),
        }
        self._check(report, 'classical coincidence after filter', filter_stage, 1 / 8, EXACT_TOL)
        self._check(report, 'classical staged coincidence after beamsplitter', staged, 1 / 16, EXACT_TOL,
                    note='coincident after the filter, then split at the beamsplitter')
        self._check(report, 'classical coincidence through combined matrix',
                    report.quantities['classical']['combined_coincidence'], 0.0, EXACT_TOL)

        distinguishable = self.evolve(u, fock_distinguishable(3, (1, 2)))
        gap = max(
            abs(p - classical_prediction(u, (1, 2), pattern))
            for pattern, p in pattern_distribution(distinguishable).items()
        )
        self._check_at_most(report, 'distinguishable photons route classically', gap, PROBABILITY_TOL)
        return report

    def run_schmidt(self, state: PureState, label: str = 'custom') -> ScenarioReport:
        """Triplet/singlet blocks, Schmidt rank and singlet weight of a two-photon state"""
        report = ScenarioReport('schmidt', inputs={'state': label})
        dec = decompose(state)
        rank = schmidt_rank(state)
        weight = singlet_weight(state)
        report.quantities.update({
            'decomposition': decomposition_to_json(dec),
            'schmidt_rank': rank,
            'singlet_weight': weight,
        })
        if state.normalized:
            rebuilt = reconstruct(dec).amplitudes
            self._check_at_most(report, 'reconstruction', float(np.max(np.abs(rebuilt - first_quantize(state).amplitudes))), EXACT_TOL)
        if label == 'indistinguishable':
            self._check(report, 'schmidt rank', rank, 1, 0)
            self._check(report, 'triplet coefficient', abs(dec.triplet.get(((1, 2), (1, 1)), 0)), 1.0, EXACT_TOL)
        elif label == 'distinguishable':
            self._check(report, 'schmidt rank', rank, 2, 0)
            self._check(report, 'singlet weight', weight, 0.5, EXACT_TOL)
            self._check(report, 'triplet coefficient', abs(dec.triplet.get(((1, 2), (1, 2)), 0)), 1 / math.sqrt(2), EXACT_TOL)
            self._check(report, 'singlet coefficient', abs(dec.singlet.get(((1, 2), (1, 2)), 0)), 1 / math.sqrt(2), EXACT_TOL)
        elif label == 'filtered':
            self._check(report, 'schmidt rank', rank, 1, 0)
            self._check_at_most(report, 'singlet weight', weight, EXACT_TOL)
        return report

    def run_family(self, seed: int, betas: Sequence[float] = FAMILY_BETAS) -> ScenarioReport:
        """Filter family: unitarity, zero determinant and the HOM test over random phases"""
        report = ScenarioReport('family', inputs={'seed': seed, 'betas': list(betas)})
        rng = np.random.default_rng(seed)
        members = []
        for theta in FAMILY_THETAS:
            for _ in range(3):
                phi, xi, zeta = rng.uniform(0.0, 2 * math.pi, 3)
                members.append(FamilyParams(theta, float(phi), float(xi), float(zeta)))

        for p in members:
            tag = f"theta={p.theta:.4f} phi={p.phi:.4f} xi={p.xi:.4f} zeta={p.zeta:.4f}"
            u = family_unitary(p)
            self._check_at_most(report, f"unitarity {tag}", u.defect, EXACT_TOL)
            det = abs(determinant(submatrix(u.u, [1, 2], [0, 1])))
            self._check_at_most(report, f"determinant {tag}", det, EXACT_TOL)
            mixing, phase = matched_hom_angles(p)
            worst = 0.0
            for b in betas:
                _, outcome = self._filter_pipeline(u, math.sqrt(1 - b * b), b)
                worst = max(worst, singlet_weight(outcome.conditional_state),
                            self.coincidence(outcome.conditional_state, 2, 3, mixing, phase))
            self._check_at_most(report, f"matched HOM test {tag}", worst, EXACT_TOL)

        # the balanced splitter suffices on the canonical orbit only
        orbit = family_unitary(FamilyParams(math.pi / 4, 0.0, math.pi / 2, 0.0))
        _, outcome = self._filter_pipeline(orbit, 0.0, 1.0)
        self._check_at_most(report, 'balanced HOM test on theta=pi/4, xi+phi=pi/2',
                            self.coincidence(outcome.conditional_state, 2, 3), EXACT_TOL)

        degenerate = {}
        for theta in (0.0, math.pi / 2):
            _, outcome = self._filter_pipeline(family_unitary(FamilyParams(theta)), 0.0, 1.0)
            value = self.coincidence(outcome.conditional_state, 2, 3)
            degenerate[repr(theta)] = value
            self._check(report, f"degenerate theta={theta:.4f} fails the HOM test", value, 0.5, PROBABILITY_TOL)
        report.quantities['degenerate_coincidence'] = degenerate
        report.quantities['members'] = [asdict(p) for p in members]
        return report

    def run_search(self, spec: SearchSpec,
                   on_restart: Optional[Callable[[RestartOutcome], None]] = None) -> ScenarioReport:
        """Search for a filter; impossibility runs are recorded as evidence only"""
        report = ScenarioReport('search', inputs=search_spec_to_json(spec))
        result = search(spec, on_restart)
        report.quantities['result'] = result_to_json(result)
        defect = float(np.max(np.abs(result.best_unitary.conj().T @ result.best_unitary - np.eye(spec.S))))
        self._check_at_most(report, 'unitarity of best unitary', defect, 1e-8)
        if spec.objective is SearchObjective.DET_ZERO:
            if spec.S == len(spec.input_ports):
                self._check(report, 'residual bounded away from zero', float(result.residual >= 0.1), 1.0, 0,
                            note='a full unitary has |det| = 1')
            else:
                self._check_at_most(report, 'converged residual', result.residual, spec.tolerance)
        else:
            self._check(report, 'joint residual stays above 1e-4', float(result.residual > 1e-4), 1.0, 0,
                        note='numerical evidence only, not a proof')
        return report


def preset_state(name: str, alpha: complex = 1 / math.sqrt(2), beta: complex = 1 / math.sqrt(2),
                 evolve: Evolver = apply) -> PureState:
    """Built-in two-photon state; pass `ScenarioRunner.evolve` to cross-check the filtered one"""
    if name == 'indistinguishable':
        return fock_indistinguishable(2, (1, 2))
    if name == 'distinguishable':
        return fock_distinguishable(2, (1, 2))
    if name == 'filtered':
        out = evolve(canonical_filter(), partially_distinguishable(3, alpha, beta))
        outcome = postselect_vacuum(out, 1)
        if outcome.is_empty:
            raise SimulationError("Filter postselection has probability zero")
        return outcome.conditional_state
    raise SimulationError(f"Unknown preset {name!r}; choose from {', '.join(PRESETS)}")
