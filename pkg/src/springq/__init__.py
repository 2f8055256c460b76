"""springq: gate-level quantum circuits simulating classical spring-mass chains.

Block encodings of the mass-spring coupling matrix feed a QSVT-based
time-evolution construction with robust oblivious amplitude amplification;
a dense statevector engine executes every circuit, and oscillator
trajectories are validated against a classical RK4 reference.
"""
from .blockenc import BlockEncoding, StatePrepPair, lcu, product, tensor, verify
from .circuit import Circuit, Gate, add_control, count_gates, dagger, elementary_count
from .engine import StateVector, apply, backend_name, extract_block, project_ancillas
from .oscillator import ClassicalState, OscillatorSystem, Trajectory, build_matrices, rescale
from .pipeline import ResourceReport, SimulationConfig, report_resources, run

__all__ = [
    "BlockEncoding",
    "Circuit",
    "ClassicalState",
    "Gate",
    "OscillatorSystem",
    "ResourceReport",
    "SimulationConfig",
    "StatePrepPair",
    "StateVector",
    "Trajectory",
    "add_control",
    "apply",
    "backend_name",
    "build_matrices",
    "count_gates",
    "dagger",
    "elementary_count",
    "extract_block",
    "lcu",
    "product",
    "project_ancillas",
    "report_resources",
    "rescale",
    "run",
    "tensor",
    "verify",
]

__version__ = "0.1.0"
