"""
Exception family shared by every pqwalk app, and the handler that turns
them into the machine-readable error object printed by management commands.
"""

import logging

logger = logging.getLogger('core')


class PQWalkError(Exception):
    """
    Base class for contract violations raised by library code.

    Every error carries a stable ``code``, a ``details`` dict with the
    offending values (residuals, dimensions, names) and the process exit
    status a command should end with.
    """
    code = 'contract_violation'
    default_message = 'Contract violation'
    exit_status = 2

    def __init__(self, message=None, **details):
        self.message = message or self.default_message
        self.details = details
        super().__init__(self.message)

    @property
    def residual(self):
        return self.details.get('residual')

    def as_dict(self):
        return {
            'error': True,
            'code': self.code,
            'message': self.message,
            'details': self.details,
        }


class DimensionError(PQWalkError):
    code = 'dimension_mismatch'
    default_message = 'Matrix dimensions do not match'


class TracePreservationError(PQWalkError):
    code = 'tp_violation'
    default_message = 'Kraus operators are not trace preserving'


class WeightError(PQWalkError):
    code = 'weight_violation'
    default_message = 'Weights must be nonnegative and sum to 1'


class NotPQError(PQWalkError):
    code = 'not_pq'
    default_message = 'Matrix representation is not of PQ form'


class UnsupportedError(PQWalkError):
    code = 'unsupported'
    default_message = 'Input is outside the supported hypotheses'


class CompletenessError(PQWalkError):
    code = 'completeness_violation'
    default_message = 'Transition effects leaving a site do not sum to the identity'


class WindowError(PQWalkError):
    code = 'window_clipping'
    default_message = 'Walk support escapes the lattice window'


class StationarityError(PQWalkError):
    code = 'not_stationary'
    default_message = 'Operator is not stationary for the walk'


class ParameterError(PQWalkError):
    code = 'parameter_out_of_range'
    default_message = 'Parameter out of range'


class InputParseError(PQWalkError):
    code = 'parse_error'
    default_message = 'Input could not be parsed'
    exit_status = 3


class CapExceededError(PQWalkError):
    code = 'cap_exceeded'
    default_message = 'Numeric cap exceeded'
    exit_status = 4


def command_exception_handler(exc, context=None):
    """
    Map an exception raised inside a management command to an error payload.

    Returns:
        tuple: (payload dict, exit status)
    """
    command = (context or {}).get('command', 'pqwalk')

    if isinstance(exc, PQWalkError):
        logger.error(f"Command error: {exc.__class__.__name__} in {command} - {exc.message}")
        return exc.as_dict(), exc.exit_status

    logger.error(f"Unhandled exception: {exc.__class__.__name__} in {command} - {str(exc)}", exc_info=exc)
    return {
        'error': True,
        'code': 'internal_error',
        'message': 'An unexpected error occurred',
        'details': str(exc),
    }, 1
