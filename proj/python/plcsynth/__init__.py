"""PLC function-block synthesis, verification and repair."""

from ._plcsynth import (
    Block,
    BlockTypeError,
    ConstraintList,
    Error,
    InsufficientSamples,
    ParseError,
    SchemaError,
    SizeBoundExceeded,
    Unsatisfiable,
    bench,
    equivalent,
    extend,
    repair,
    run,
    simplify,
    stats,
    synthesize,
    translate,
    verify,
)

__all__ = [
    "Block",
    "BlockTypeError",
    "ConstraintList",
    "Error",
    "InsufficientSamples",
    "ParseError",
    "SchemaError",
    "SizeBoundExceeded",
    "Unsatisfiable",
    "bench",
    "equivalent",
    "extend",
    "repair",
    "run",
    "simplify",
    "stats",
    "synthesize",
    "translate",
    "verify",
]
