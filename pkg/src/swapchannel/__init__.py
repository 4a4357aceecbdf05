"""Pulsed-bias qubit-chain swapping channels: design, schedule, simulate.

The package models chains of permanently coupled qubits whose only run-time
control is each qubit's z bias.  It solves for operating points where a
single bias pulse realises a controlled flip, compiles swap/copy pulse
schedules for quantum and classical wires over such chains, validates them
symbolically, and simulates them either in the reduced (frozen-neighbour)
model or against the full chain Hamiltonian.
"""

from .chain import (
    ChainSpec,
    TwoLevelParams,
    build_hamiltonian,
    is_hermitian,
    is_unitary,
    phase_angle,
    reduce_to_target,
    wrap_phase,
)
from .evolve import (
    EntanglementError,
    QuantumState,
    ResetPurityWarning,
    apply_local_unitary,
    apply_unitary,
    evolve_window,
    inject_state,
    propagator,
    reduced_state,
    reset_qubit,
    sample_probability,
    sample_trajectory,
)
from .gates import (
    PhasedGate,
    PhaseLedger,
    ideal_cnot,
    ideal_copy,
    ideal_swap,
    reduced_pulse_operator,
    track_phases,
)
from .runner import (
    ClassicalReport,
    GateReport,
    TransferReport,
    compute_frame_correction,
    copy_truth_table,
    infidelity_slope,
    run_classical_channel,
    run_gate_experiment,
    run_quantum_channel,
    sweep_eps_high,
)
from .scheduler import (
    LineAssignment,
    PulseEvent,
    PulseSchedule,
    ScheduleError,
    Window,
    classical_channel_schedule,
    line_conflict_check,
    quantum_channel_schedule,
    replay_occupancy,
    schedule_from_json,
    schedule_to_json,
    swap_pulses,
    validate_sacrificial,
)
from .solver import (
    GateDesign,
    InfeasibleDesignError,
    OscillationDescriptor,
    copy_frequencies,
    oscillation_descriptor,
    snapped_hold_bias,
    solve_for_timestep,
    solve_parameters,
    validate_gate_conditions,
)

__version__ = "0.1.0"

__all__ = [
    "ChainSpec",
    "TwoLevelParams",
    "build_hamiltonian",
    "reduce_to_target",
    "phase_angle",
    "wrap_phase",
    "is_hermitian",
    "is_unitary",
    "QuantumState",
    "EntanglementError",
    "ResetPurityWarning",
    "propagator",
    "evolve_window",
    "apply_unitary",
    "apply_local_unitary",
    "sample_probability",
    "reduced_state",
    "reset_qubit",
    "inject_state",
    "sample_trajectory",
    "GateDesign",
    "OscillationDescriptor",
    "InfeasibleDesignError",
    "oscillation_descriptor",
    "solve_parameters",
    "solve_for_timestep",
    "copy_frequencies",
    "validate_gate_conditions",
    "snapped_hold_bias",
    "PhasedGate",
    "PhaseLedger",
    "ideal_cnot",
    "ideal_swap",
    "ideal_copy",
    "reduced_pulse_operator",
    "track_phases",
    "PulseEvent",
    "Window",
    "PulseSchedule",
    "LineAssignment",
    "ScheduleError",
    "swap_pulses",
    "quantum_channel_schedule",
    "classical_channel_schedule",
    "replay_occupancy",
    "validate_sacrificial",
    "line_conflict_check",
    "schedule_to_json",
    "schedule_from_json",
    "GateReport",
    "TransferReport",
    "ClassicalReport",
    "run_gate_experiment",
    "copy_truth_table",
    "sweep_eps_high",
    "infidelity_slope",
    "compute_frame_correction",
    "run_quantum_channel",
    "run_classical_channel",
    "__version__",
]
