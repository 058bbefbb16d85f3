"""
Configuration settings for the distinguishability filter simulator
"""
import os
from dataclasses import dataclass

from dotenv import load_dotenv

load_dotenv()


@dataclass
class NumericsConfig:
    """Tolerances and size bounds for the numerical kernels"""
    # Comparisons use whichever of absolute/relative is looser
    ABS_TOL: float = float(os.getenv('QFILTER_ABS_TOL', '1e-12'))
    REL_TOL: float = float(os.getenv('QFILTER_REL_TOL', '1e-10'))

    # Amplitudes below this are dropped from states
    PRUNE_TOL: float = 1e-14
    NORM_TOL: float = 1e-10
    UNITARITY_TOL: float = float(os.getenv('QFILTER_UNITARITY_TOL', '1e-10'))
    SCHMIDT_TOL: float = 1e-8

    # Size bounds
    MAX_PERMANENT_N: int = 20
    MAX_IMMANANT_N: int = 6
    MAX_EVOLVE_N: int = 6
    ORACLE_MAX_N: int = 4
    ORACLE_MAX_MODES: int = 8  # S * L
    MAX_SEARCH_MODES: int = 6

    # Phase of the beamsplitter off-diagonal coupling; 0 is the symmetric splitter
    BEAMSPLITTER_PHASE: float = float(os.getenv('QFILTER_BS_PHASE', '0.0'))


@dataclass
class SearchConfig:
    """Filter search configuration"""
    RESTARTS: int = int(os.getenv('QFILTER_RESTARTS', '32'))
    MAX_ITERS: int = 2000
    POLISH_ITERS: int = 200
    TOLERANCE: float = 1e-8  # residual at or below this counts as converged
    OPTIMIZER_FTOL: float = 1e-12
    SEED: int = int(os.getenv('QFILTER_SEED', '2017'))

    # Minimum coincident throughput |per M|^2 demanded by the det_zero objective
    MIN_THROUGHPUT: float = 0.1


@dataclass
class OutputConfig:
    """CLI output configuration"""
    OUT_DIR: str = os.getenv('QFILTER_OUT_DIR', 'results')
    SIGNIFICANT_DIGITS: int = 17
    DEFAULT_GRID_POINTS: int = 21
    LOG_LEVEL: str = os.getenv('QFILTER_LOG_LEVEL', 'INFO')


# Global configuration instances
numerics_config = NumericsConfig()
search_config = SearchConfig()
output_config = OutputConfig()
