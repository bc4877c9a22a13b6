"""Distributed subgradient methods as one iteration ``X(t+1) = P(t) X(t) - Delta(t) G(t)``
over time-varying row-stochastic mixing."""

from .absolute_probability import (
    AbsProbSequence,
    compute_abs_prob,
    induced_row_stochastic,
    perron_vector,
    pushsum_abs_prob,
    pushsum_induced_sequence,
    pushsum_masses,
)
from .diagnostics import DiagnosticsContext, DiagnosticsRow, measure, tau_decay_profile
from .engine import (
    AgentStates,
    AlgorithmInputs,
    PushSumStates,
    Trajectory,
    embed,
    run_algorithm,
    run_dgd,
    run_dgd_post,
    run_push_first,
    run_row_stochastic,
    run_subgradient_push,
    run_unified,
    unified_step,
    verify_embedding,
)
from .errors import ConsensusError
from .graph_conditions import (
    ConditionReport,
    DirectedGraph,
    check_A1,
    check_A1_prime,
    check_A1_star,
    implication_demo,
    strongly_connected,
)
from .problems import CustomProblem, L1MedianInstance, L1RegressionInstance
from .sequences import MatrixSequence
from .step_schedules import (
    StepSchedule,
    audit_assumptions,
    common_power,
    per_agent_explicit,
    perturbed_schedule,
    pi_scaled_power,
)
from .stochastic_matrix import (
    StochasticMatrix,
    backward_product,
    ergodicity_coefficient,
    validate,
)

__version__ = "0.1.0"
