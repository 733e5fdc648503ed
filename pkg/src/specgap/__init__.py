"""Simulation-free seismic survey design by spectral-gap optimization.

Improves randomized source-subsampling masks by minimizing the ratio of
the two largest singular values of the mask's midpoint-offset image with
simulated annealing, and verifies the improvement with a rank-constrained
matrix-completion oracle on synthetic data.
"""

from .anneal import (AnnealConfig, AnnealResult, TrajectoryPoint, accept,
                     optimize, propose_neighbor, resolve_schedule, temperature,
                     write_trajectory_csv)
from .completion import (CompletionConfig, FrequencySlice, complete,
                         load_slice, save_slice, snr, subsample)
from .errors import (ConvergenceError, DegenerateInputError,
                     DegenerateRatioError, InvalidArgumentError,
                     NumericalError, SpecgapError)
from .experiment import ExperimentConfig, run_experiment, stage_seed
from .kernels import active_backend
from .modomain import MOMatrix, dump_coords, mo_nonzeros, to_mo
from .spectral import SpectralResult, spectral_ratio, top2_singular
from .survey import (RegionPartition, SourceMask, SurveyGrid,
                     check_constraints, jittered_mask, load_mask_json,
                     load_mask_text, make_partition, save_mask_json,
                     save_mask_text)
from .synth import EventSpec, lowrank_mo_slice, planar_events_slice

__version__ = "0.1.0"
