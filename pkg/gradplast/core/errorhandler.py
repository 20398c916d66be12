"""
Centralized error handling module for GradPlast.

This module provides a unified error handling system with standardized error codes
and consistent error reporting across the solver, the case builders and the CLI.

Error Code Format: [RESOURCE-XXX]
- RESOURCE: 3-5 letter abbreviation identifying the component (e.g., CFG, MESH, SOLV)
- XXX: Three-digit progressive number uniquely identifying the error within that resource

Examples:
- [CFG-003]: Unknown key in a configuration section
- [MESH-002]: Non-positive Jacobian determinant
- [SOLV-003]: Time step fell below dt_min
"""
from enum import Enum
from typing import Any, Dict, Optional

from .logger import Logger


class ErrorCode(Enum):
    """Standardized error codes for the application"""

    # Configuration errors (CFG-XXX)
    CFG_FILE_MISSING = "[CFG-001]"
    CFG_PARSE_ERROR = "[CFG-002]"
    CFG_UNKNOWN_KEY = "[CFG-003]"
    CFG_MISSING_SECTION = "[CFG-004]"
    CFG_INVALID_VALUE = "[CFG-005]"
    CFG_CONFLICTING_CONSTRAINTS = "[CFG-006]"
    CFG_INCOMPATIBLE_SETTINGS = "[CFG-007]"

    # Field validation errors (VALID-XXX)
    VALID_EMPTY_FIELD = "[VALID-001]"
    VALID_NOT_NUMERIC = "[VALID-002]"
    VALID_OUT_OF_RANGE = "[VALID-003]"
    VALID_INVALID_CHOICE = "[VALID-004]"
    VALID_INVALID_FORMAT = "[VALID-005]"

    # Mesh and dof map errors (MESH-XXX)
    MESH_DEGENERATE_GEOMETRY = "[MESH-001]"
    MESH_NEGATIVE_JACOBIAN = "[MESH-002]"
    MESH_DOF_OUT_OF_RANGE = "[MESH-003]"
    MESH_INTERFACE_MISMATCH = "[MESH-004]"

    # Bulk constitutive errors (MAT-XXX)
    MAT_INVALID_PARAMETER = "[MAT-001]"
    MAT_INCONSISTENT_STATE = "[MAT-002]"
    MAT_NEGATIVE_DISSIPATION = "[MAT-004]"

    # Grain boundary constitutive errors (GB-XXX)
    GB_INVALID_PARAMETER = "[GB-001]"
    GB_NEGATIVE_DISSIPATION = "[GB-003]"

    # Solver errors (SOLV-XXX)
    SOLV_NOT_CONVERGED = "[SOLV-001]"
    SOLV_SINGULAR_MATRIX = "[SOLV-002]"
    SOLV_STEP_TOO_SMALL = "[SOLV-003]"
    SOLV_DIVERGED = "[SOLV-004]"
    SOLV_INACCURATE_SOLVE = "[SOLV-005]"

    # File errors (FILE-XXX)
    FILE_NOT_FOUND = "[FILE-001]"
    FILE_ACCESS_DENIED = "[FILE-002]"
    FILE_INVALID_FORMAT = "[FILE-003]"
    FILE_SAVE_FAILED = "[FILE-004]"

    # Post-processing and output data errors (DATA-XXX)
    DATA_INVALID_FORMAT = "[DATA-001]"
    DATA_INCOMPLETE = "[DATA-002]"
    DATA_NOT_MONOTONE = "[DATA-003]"

    # System errors (SYS-XXX)
    SYS_DEPENDENCY_MISSING = "[SYS-001]"
    SYS_WORKER_FAILED = "[SYS-002]"
    SYS_UNEXPECTED_ERROR = "[SYS-003]"


class GradPlastError(Exception):
    """Base class of every error raised on purpose by the package"""
    exit_code = 1

    def __init__(self, error_code: ErrorCode, message: str = ""):
        self.error_code = error_code
        self.message = message
        super().__init__(f"{error_code.value}: {message}")

    def __reduce__(self):
        # keeps the code intact when raised inside a worker process
        return self.__class__, (self.error_code, self.message)


class ConfigError(GradPlastError):
    """Custom exception for configuration-related errors"""
    exit_code = 2


class ValidationError(GradPlastError):
    """Custom exception for validation errors"""
    exit_code = 2


class MeshError(GradPlastError):
    """Custom exception for mesh and dof-map errors"""
    exit_code = 3


class MaterialError(GradPlastError):
    """Custom exception for bulk constitutive errors"""
    exit_code = 4


class GrainBoundaryError(GradPlastError):
    """Custom exception for grain boundary constitutive errors"""
    exit_code = 4


class SolverError(GradPlastError):
    """
    Custom exception for Newton, linear solve and time stepping failures.

    Carries an optional ``diagnostics`` dict (offending dofs, step data).
    """
    exit_code = 5

    def __init__(self, error_code: ErrorCode, message: str = "",
                 diagnostics: Optional[Dict[str, Any]] = None):
        super().__init__(error_code, message)
        self.diagnostics = diagnostics or {}

    def __reduce__(self):
        return self.__class__, (self.error_code, self.message, self.diagnostics)


class FileError(GradPlastError):
    """Custom exception for file-related errors"""
    exit_code = 6


class DataError(GradPlastError):
    """Custom exception for output data and post-processing errors"""
    exit_code = 6


class ErrorHandler:
    """
    Centralized error handler for the application.

    Logs errors in the structured format and maps them to process exit codes.
    """

    def __init__(self, logger=None):
        self.logger = logger or Logger()

    def handle_error(self, exception, context="Run failed") -> int:
        """
        Handle an exception with consistent logging.
        Uses structured logging format: LEVEL-CODE-Message

        Args:
            exception: The exception that occurred
            context: Short description of what was being done

        Returns:
            int: Process exit code for the error category
        """
        error_code = ""
        technical_message = str(exception)

        if hasattr(exception, 'error_code'):
            error_code = exception.error_code.value.strip('[]')
            if getattr(exception, 'message', ""):
                technical_message = exception.message
        else:
            error_code = ErrorCode.SYS_UNEXPECTED_ERROR.value.strip('[]')

        self.logger.error(f"{context}: {technical_message}", error_code=error_code,
                          exc_info=True)

        diagnostics = getattr(exception, 'diagnostics', None)
        if diagnostics:
            for key in sorted(diagnostics):
                self.logger.debug(f"  {key} = {diagnostics[key]}")

        return self.exit_code_for(exception)

    @staticmethod
    def exit_code_for(exception) -> int:
        """
        Map an exception to the CLI exit code of its category.

        Args:
            exception: Any exception

        Returns:
            int: 2 config/validation, 3 mesh, 4 material/GB, 5 solver,
            6 file/data, 1 anything else
        """
        if isinstance(exception, GradPlastError):
            return exception.exit_code
        if isinstance(exception, (FileNotFoundError, PermissionError)):
            return FileError.exit_code
        return 1
