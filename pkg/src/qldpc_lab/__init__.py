"""Fault-tolerance experiments for quantum LDPC codes."""

from .gf2 import BinaryMatrix, PauliOperator, rank, solve_affine, symplectic_product
from .stabilizer import CssCode, StabilizerCode
from .construct import (
    ClassicalCode,
    code_family,
    hamming_code,
    hypergraph_product,
    random_gallager_ldpc,
    repetition_code,
)
from .noise import FaultPath, PhenomenologicalParams, observed_syndromes
from .decoders import decode_spacetime, decode_static, failure_diagnostics, greedy_cluster_decode
from .shor import cat_state_circuit, circuit_round, propagate_faults, schedule_generators
from .overhead import ProtocolParams, effective_rates, plan_blocks, threshold_constants
from .harness import ExperimentConfig, run_memory_experiment, threshold_scan

__version__ = "0.1.0"
