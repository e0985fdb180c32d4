"""Seedable Monte Carlo simulator and analytic toolkit for downlink
opportunistic interference alignment in a three-cell MIMO system."""

from ._backend import backend_name, have_compiled
from .channel import ChannelRealization, SystemConfig, draw_realization, interferers, sinr, sum_rate
from .codebook import Codebook, generate as generate_codebook
from .harness import ExperimentSpec, ResultRow, SchemeVariant, figure, run, table1
from .linalg import draw_complex_gaussian_matrix, draw_unit_vector, rank1_gen_eig
from .metrics import (MetricTable, alignment_metric, effective_gain, hybrid_metric,
                      max_sinr_receiver, max_snr_receiver)
from .rng import make_rng
from .selection import (FeedbackReport, SelectionOutcome, apply_threshold,
                        measured_feedback_load, select_coia_full, select_coia_threshold,
                        select_max_sinr, select_max_snr, select_oia)

__version__ = "0.1.0"
