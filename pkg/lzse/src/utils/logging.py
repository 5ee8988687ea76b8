"""
Logging utilities for lzse.

Structured logging with structlog. Records go to stderr so that factor
streams and decoded text written to stdout stay clean.
"""

import logging
import sys
from typing import Any, Dict, Optional

import structlog


def configure_logging(log_level: str = "WARNING", json_logs: bool = False, service_name: str = "lzse") -> None:
    """
    Configure structured logging for the toolkit.

    Args:
        log_level: Logging level (DEBUG, INFO, WARNING, ERROR, CRITICAL)
        json_logs: Render records as JSON lines instead of console text
        service_name: Name bound into every record
    """
    level = getattr(logging, str(log_level).upper())

    logging.basicConfig(
        level=level,
        format="%(message)s",
        stream=sys.stderr,
    )

    structlog.configure(
        processors=[
            structlog.contextvars.merge_contextvars,
            structlog.processors.add_log_level,
            structlog.processors.StackInfoRenderer(),
            structlog.processors.format_exc_info,
            structlog.processors.TimeStamper(fmt="iso"),
            structlog.processors.JSONRenderer() if json_logs
            else structlog.dev.ConsoleRenderer(colors=False),
        ],
        wrapper_class=structlog.make_filtering_bound_logger(level),
        context_class=dict,
        logger_factory=structlog.PrintLoggerFactory(file=sys.stderr),
        cache_logger_on_first_use=False,
    )

    structlog.contextvars.clear_contextvars()
    structlog.contextvars.bind_contextvars(service=service_name)


def get_logger(name: Optional[str] = None) -> Any:
    """
    Get a structured logger instance.

    Args:
        name: Logger name (usually module name)

    Returns:
        Configured structlog logger
    """
    return structlog.get_logger(name)


def log_phase(phase: str, duration_ms: float, **context: Any) -> None:
    """Log completion of one pipeline phase (SA, LCP, tree, rounds, matching)."""
    get_logger("lzse.phase").info(
        f"Phase complete: {phase}",
        phase=phase,
        duration_ms=round(duration_ms, 3),
        event_type="phase_complete",
        **context
    )


def log_lemma_check(lemma: str, holds: bool, **quantities: Any) -> None:
    """Log the outcome of one audited bound."""
    log = get_logger("lzse.audit")
    if holds:
        log.debug(f"Bound holds: {lemma}", lemma=lemma, holds=True, event_type="lemma_check", **quantities)
    else:
        log.error(f"Bound violated: {lemma}", lemma=lemma, holds=False, event_type="lemma_check", **quantities)


def log_error_with_context(
    error_type: str,
    error_message: str,
    context: Optional[Dict[str, Any]] = None,
    exc_info: bool = False
) -> None:
    """
    Log errors with full context for debugging.

    Args:
        error_type: Category of error (invariant, codec, io, ...)
        error_message: Human-readable error description
        context: Additional context data
        exc_info: Whether to include exception traceback
    """
    log_data: Dict[str, Any] = {
        "error_type": error_type,
        "error_message": error_message,
        "event_type": "error_occurred",
    }
    if context:
        log_data.update(context)

    get_logger("lzse.error").error(f"Error: {error_type}", exc_info=exc_info, **log_data)


logger = get_logger("lzse")
