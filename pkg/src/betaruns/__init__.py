"""Exact-arithmetic toolkit for beta-expansions.

Digits, admissible words, cylinder geometry, zero-run statistics, seeded
point constructions with certified checkpoints, and Monte Carlo checks of
the run-length growth laws, all over exact field arithmetic.
"""

from .field import (
    BetaContext,
    BetaSpec,
    BudgetExceededError,
    ContextMismatchError,
    ExactReal,
    SpecError,
    approximate,
    certified_ceil,
    certified_compare,
    certified_floor,
    make_beta,
    parse_beta,
)
from .expansion import (
    DigitStream,
    DigitWord,
    ExpansionOfOne,
    RunLengthState,
    beta_transform,
    digit_stream,
    evaluate,
    expansion_of_one,
    run_length,
)
from .cylinders import (
    Cylinder,
    InadmissibleWordError,
    admissible_parry,
    census,
    cylinder,
    enumerate_words,
    follower_value,
    is_full,
    shortest_full_spacer,
)
from .constructions import (
    CheckpointReport,
    EpSchedule,
    InfeasibleScheduleError,
    USchedule,
    build_ep_schedule,
    build_u_schedule,
    ep_stream,
    full_start_words,
    parse_rate,
    symbolic_runlengths,
    u_stream,
    verify_ep_checkpoints,
    verify_u_checkpoints,
)
from .analysis import (
    MassAssignment,
    MCReport,
    assign_mass,
    cover_exponent,
    local_dimension_profile,
    mc_law,
    verify_counts,
)

__version__ = "0.1.0"
