"""Jet Riemann-Lagrange geometry of autonomous first-order ODE systems."""

from .field import (
    EvaluationError,
    FieldParseError,
    UnboundParameterError,
    VectorField,
    eval_field,
    load_field,
    parse_expression,
    parse_field,
    partial,
    second_partial,
)

__version__ = "0.1.0"
