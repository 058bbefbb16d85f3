"""
Core data models for the distinguishability filter simulator
"""
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from config import numerics_config, search_config


class SimulationError(ValueError):
    """Base class for every error raised by the simulator"""


class DimensionError(SimulationError):
    """Shape, size or index mismatch"""


class NormalizationError(SimulationError):
    """Amplitudes that should be normalized are not (or cannot be)"""


class NotUnitaryError(SimulationError):
    """Matrix handed in as an interferometer is not unitary"""


class SizeBoundError(SimulationError):
    """Problem size above a supported bound"""


class ParameterError(SimulationError):
    """Parameter outside its physical domain"""


class OracleMismatchError(SimulationError):
    """Fast evolution disagrees with the creation-operator expansion"""


class SearchObjective(Enum):
    DET_ZERO = "det_zero"
    DET_ZERO_PLUS_NONCOINCIDENT = "det_zero_plus_noncoincident"


@dataclass(frozen=True)
class Partition:
    """Young diagram row lengths"""
    parts: Tuple[int, ...]

    def __post_init__(self):
        parts = tuple(int(p) for p in self.parts)
        if any(p < 1 for p in parts):
            raise DimensionError(f"Partition parts must be positive: {parts}")
        if any(parts[i] < parts[i + 1] for i in range(len(parts) - 1)):
            raise DimensionError(f"Partition parts must be non-increasing: {parts}")
        object.__setattr__(self, 'parts', parts)

    @property
    def n(self) -> int:
        return sum(self.parts)


@dataclass(frozen=True)
class ModeShape:
    """System modes S (rows) by Label modes L (columns)"""
    S: int
    L: int

    def __post_init__(self):
        if self.S < 1 or self.L < 1:
            raise DimensionError(f"Mode counts must be positive, got S={self.S}, L={self.L}")


@dataclass(frozen=True, order=True)
class FockArray:
    """Occupation grid; rows are System modes, columns Label modes"""
    occ: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        if not self.occ or not self.occ[0]:
            raise DimensionError("Fock array needs at least one System and one Label mode")
        width = len(self.occ[0])
        if any(len(row) != width for row in self.occ):
            raise DimensionError("Fock array rows have unequal length")
        if any(n < 0 for row in self.occ for n in row):
            raise DimensionError(f"Negative occupation in {self.occ}")

    @classmethod
    def from_rows(cls, rows) -> "FockArray":
        return cls(tuple(tuple(int(n) for n in row) for row in rows))

    @property
    def shape(self) -> ModeShape:
        return ModeShape(len(self.occ), len(self.occ[0]))

    @property
    def n(self) -> int:
        return sum(sum(row) for row in self.occ)

    def row_sums(self) -> Tuple[int, ...]:
        return tuple(sum(row) for row in self.occ)

    def column(self, label: int) -> Tuple[int, ...]:
        return tuple(row[label] for row in self.occ)

    def to_array(self) -> np.ndarray:
        return np.array(self.occ, dtype=int)


@dataclass(frozen=True, eq=False)
class PureState:
    """Superposition of Fock arrays with a common shape and particle number"""
    shape: ModeShape
    n: int
    terms: Dict[FockArray, complex]
    normalized: bool = True
    norm: float = field(init=False)

    def __post_init__(self):
        kept = {}
        for key, amplitude in self.terms.items():
            if key.shape != self.shape or key.n != self.n:
                raise DimensionError(
                    f"Fock array {key.occ} does not match shape {self.shape} with N={self.n}"
                )
            amplitude = complex(amplitude)
            if not (math.isfinite(amplitude.real) and math.isfinite(amplitude.imag)):
                raise SimulationError(f"Non-finite amplitude on {key.occ}")
            if abs(amplitude) >= numerics_config.PRUNE_TOL:
                kept[key] = amplitude
        kept = dict(sorted(kept.items()))
        norm = math.sqrt(sum(abs(a) ** 2 for a in kept.values()))
        if self.normalized and abs(norm - 1.0) > numerics_config.NORM_TOL:
            raise NormalizationError(f"State flagged normalized has norm {norm!r}")
        object.__setattr__(self, 'terms', kept)
        object.__setattr__(self, 'norm', norm)

    def amplitude(self, key: FockArray) -> complex:
        return self.terms.get(key, 0j)

    def __len__(self) -> int:
        return len(self.terms)


@dataclass(frozen=True, eq=False)
class LabelGram:
    """Pairwise overlaps of the photons' Label wavefunctions"""
    g: np.ndarray

    def __post_init__(self):
        g = np.asarray(self.g, dtype=complex)
        if g.ndim != 2 or g.shape[0] != g.shape[1] or g.shape[0] < 1:
            raise DimensionError(f"Gram matrix must be square, got shape {g.shape}")
        if not np.allclose(g, g.conj().T, atol=numerics_config.NORM_TOL):
            raise ParameterError("Gram matrix is not Hermitian")
        if not np.allclose(np.diag(g), 1.0, atol=numerics_config.NORM_TOL):
            raise ParameterError("Gram matrix must have unit diagonal")
        if np.linalg.eigvalsh(g).min() < -numerics_config.NORM_TOL:
            raise ParameterError("Gram matrix is not positive semidefinite")
        object.__setattr__(self, 'g', g)

    @property
    def k(self) -> int:
        return self.g.shape[0]


@dataclass(frozen=True, eq=False)
class Interferometer:
    """System-only transfer matrix, u[t, s] takes input mode s to output mode t"""
    u: np.ndarray
    defect: float = field(init=False)

    def __post_init__(self):
        u = np.asarray(self.u, dtype=complex)
        if u.ndim != 2 or u.shape[0] != u.shape[1] or u.shape[0] < 1:
            raise DimensionError(f"Transfer matrix must be square, got shape {u.shape}")
        if not np.all(np.isfinite(u)):
            raise SimulationError("Transfer matrix has non-finite entries")
        defect = float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))))
        if defect > numerics_config.UNITARITY_TOL:
            raise NotUnitaryError(f"Unitarity defect {defect:.3e} exceeds tolerance")
        object.__setattr__(self, 'u', u)
        object.__setattr__(self, 'defect', defect)

    @property
    def dim(self) -> int:
        return self.u.shape[0]


@dataclass(frozen=True)
class SpatialPattern:
    """Photons counted per System output port, Label ignored"""
    counts: Tuple[int, ...]

    def __post_init__(self):
        counts = tuple(int(c) for c in self.counts)
        if any(c < 0 for c in counts):
            raise DimensionError(f"Negative count in pattern {counts}")
        object.__setattr__(self, 'counts', counts)

    @property
    def n(self) -> int:
        return sum(self.counts)


@dataclass(frozen=True)
class PostselectionResult:
    """Outcome of postselecting vacuum in one port"""
    port: int
    probability: float
    conditional_state: Optional[PureState]
    unnormalized_state: Optional[PureState] = None

    @property
    def is_empty(self) -> bool:
        return self.conditional_state is None


@dataclass(frozen=True, eq=False)
class FirstQuantizedState:
    """Totally symmetric two-particle wavefunction psi[s1, l1, s2, l2]"""
    amplitudes: np.ndarray

    def __post_init__(self):
        psi = np.asarray(self.amplitudes, dtype=complex)
        if psi.ndim != 4 or psi.shape[:2] != psi.shape[2:]:
            raise DimensionError(f"Expected shape (S, L, S, L), got {psi.shape}")
        if not np.allclose(psi, psi.transpose(2, 3, 0, 1), atol=numerics_config.ABS_TOL):
            raise SimulationError("First quantized state is not exchange symmetric")
        object.__setattr__(self, 'amplitudes', psi)

    @property
    def system_dim(self) -> int:
        return self.amplitudes.shape[0]

    @property
    def label_dim(self) -> int:
        return self.amplitudes.shape[1]

    @property
    def d(self) -> int:
        return self.system_dim * self.label_dim

    @property
    def terms(self) -> Dict[Tuple[Tuple[int, int], Tuple[int, int]], complex]:
        """Nonzero amplitudes keyed by ((s1, l1), (s2, l2)), 0-based"""
        out = {}
        for idx in zip(*np.nonzero(np.abs(self.amplitudes) >= numerics_config.PRUNE_TOL)):
            s1, l1, s2, l2 = (int(i) for i in idx)
            out[((s1, l1), (s2, l2))] = complex(self.amplitudes[idx])
        return out


@dataclass(frozen=True, eq=False)
class DualityDecomposition:
    """Two-photon state in the (System irrep) x (Label irrep) product basis.

    Triplet keys are ((x, y), (a, b)) with x <= y and a <= b; singlet keys have
    strict inequalities. System modes and Labels are 1-based.
    """
    system_dim: int
    label_dim: int
    labels: Tuple[int, ...]  # occupied Labels, 0-based, the projected Label space
    triplet_matrix: np.ndarray
    singlet_matrix: np.ndarray
    triplet: Dict[Tuple[Tuple[int, int], Tuple[int, int]], complex]
    singlet: Dict[Tuple[Tuple[int, int], Tuple[int, int]], complex]
    schmidt_coefficients: Tuple[float, ...]
    sector_coefficients: Dict[str, Tuple[float, ...]]

    @property
    def triplet_weight(self) -> float:
        return float(np.sum(np.abs(self.triplet_matrix) ** 2))

    @property
    def singlet_weight(self) -> float:
        return float(np.sum(np.abs(self.singlet_matrix) ** 2))


@dataclass(frozen=True)
class FamilyParams:
    """Angles of the continuous filter family, radians"""
    theta: float
    phi: float = 0.0
    xi: float = 0.0
    zeta: float = 0.0

    def __post_init__(self):
        for name in ('theta', 'phi', 'xi', 'zeta'):
            if not math.isfinite(getattr(self, name)):
                raise ParameterError(f"{name} must be finite")

    @property
    def degenerate(self) -> bool:
        c, s = math.cos(self.theta), math.sin(self.theta)
        return abs(c) < numerics_config.ABS_TOL or abs(s) < numerics_config.ABS_TOL


@dataclass(frozen=True)
class SearchSpec:
    """Filter search problem; ports are 1-based"""
    S: int
    input_ports: Tuple[int, ...]
    output_ports: Tuple[int, ...]
    objective: SearchObjective = SearchObjective.DET_ZERO
    restarts: int = search_config.RESTARTS
    seed: int = search_config.SEED
    max_iters: int = search_config.MAX_ITERS
    tolerance: float = search_config.TOLERANCE
    min_throughput: float = search_config.MIN_THROUGHPUT

    def __post_init__(self):
        object.__setattr__(self, 'input_ports', tuple(int(p) for p in self.input_ports))
        object.__setattr__(self, 'output_ports', tuple(int(p) for p in self.output_ports))
        if not isinstance(self.objective, SearchObjective):
            object.__setattr__(self, 'objective', SearchObjective(self.objective))
        if self.S < 2:
            raise DimensionError("Search needs at least two System modes")
        if self.S > numerics_config.MAX_SEARCH_MODES:
            raise SizeBoundError(f"Search supports at most {numerics_config.MAX_SEARCH_MODES} modes")
        if len(self.input_ports) != len(self.output_ports) or not self.input_ports:
            raise DimensionError("Input and output port lists must be non-empty and of equal length")
        for ports in (self.input_ports, self.output_ports):
            if len(set(ports)) != len(ports):
                raise DimensionError(f"Repeated port in {ports}")
            if any(p < 1 or p > self.S for p in ports):
                raise DimensionError(f"Port out of range 1..{self.S} in {ports}")
        if self.restarts < 1 or self.max_iters < 1:
            raise ParameterError("restarts and max_iters must be positive")
        if self.seed < 0:
            raise ParameterError("seed must be non-negative")
        if self.tolerance < 0 or self.min_throughput < 0:
            raise ParameterError("tolerance and min_throughput must be non-negative")


@dataclass
class RestartOutcome:
    """One local descent of the search"""
    index: int
    residual: float
    iterations: int
    parameters: np.ndarray


@dataclass
class SearchResult:
    """Best unitary found over all restarts"""
    best_unitary: np.ndarray
    residual: float
    iterations: int
    converged: bool
    best_restart: int
    restart_residuals: List[float] = field(default_factory=list)
    statistics: Dict[str, float] = field(default_factory=dict)


@dataclass
class Check:
    """One pass/fail comparison in a scenario report"""
    name: str
    value: Any
    expected: Any
    tolerance: float
    passed: bool
    note: str = ""


@dataclass
class ScenarioReport:
    """Outcome of one named CLI scenario"""
    scenario: str
    inputs: Dict[str, Any] = field(default_factory=dict)
    quantities: Dict[str, Any] = field(default_factory=dict)
    checks: List[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)
