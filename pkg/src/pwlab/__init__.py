"""Exact rational interval sets, piecewise-linear function algebra, and
measure-concentrating counterexample constructions with exact verifiers."""

from ._rat import Rational, pow2, rat, rat_str
from .intervals import (
    EMPTY,
    Error,
    Interval,
    IntervalSet,
    boolean,
    complement_within,
    dilate,
    distance,
    interval_set,
    ivl,
    measure,
    normalize,
    third,
    thirds,
)
from .pwl import (
    ACWitness,
    DomainError,
    MonotoneError,
    PWL,
    check_2L,
    check_bilipschitz,
    find_ac_failure_witness,
    measure_from_cdf,
    open_image,
)
from .zigzag import (
    FamilyScript,
    LinearityError,
    ScriptError,
    ZigzagRun,
    ZigzagState,
    build_run,
    build_stage,
    classify_well_located,
    peers,
    select_core,
    shrink,
    triple,
    validate_family,
    verify_core_images,
    verify_image_identity,
    verify_locality,
    verify_measure_bounds,
    with_choice,
)
from .concentrate import (
    ChainResult,
    ConcentrateResult,
    ConfigError,
    PriorityState,
    build_chain,
    concentrate,
    init_priority,
    priority_step,
    run_priority,
    verify_concentrate,
    verify_kurtz_image,
)

__version__ = "0.1.0"
