"""
Exception types shared by the pipeline stages.

The CLI maps them to exit codes (validation=2, solver=3, safety=4).
"""
from __future__ import annotations
from typing import Any, Dict, Optional


class _PipelineError(Exception):
    def __init__(self, message: str, index: Optional[int] = None,
                 diagnostics: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.index = index
        self.diagnostics = dict(diagnostics or {})


class ValidationError(_PipelineError, ValueError):
    """Malformed input: schema, geometry invariant, bad query."""


class SolverError(_PipelineError, RuntimeError):
    """A numerical stage failed: grid solve, search, QP."""


class SafetyViolation(_PipelineError, RuntimeError):
    """A logged closed-loop position left its quadrangle."""
