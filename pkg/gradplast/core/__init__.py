"""
Core module for GradPlast.

This module contains cross-cutting functionality: error handling, data
validation, file utilities, configuration and logging.
"""

from .errorhandler import (
    ErrorHandler, ErrorCode, GradPlastError, ConfigError, ValidationError, MeshError,
    MaterialError, GrainBoundaryError, SolverError, FileError, DataError
)
from .tools import (
    read_json, save_json, save_csv, read_csv, format_float,
    ensure_directory_exists, load_app_info
)
from .validator import (
    is_numeric, is_positive_number, is_non_negative_number, is_in_range,
    is_not_empty, is_valid_choice, validate_list_not_empty, reject_unknown_keys
)
from .config import CaseConfig, parse_config, load_config, config_from_dict, apply_override
from .logger import Logger

__all__ = [
    # Error handling
    'ErrorHandler', 'ErrorCode', 'GradPlastError', 'ConfigError', 'ValidationError',
    'MeshError', 'MaterialError', 'GrainBoundaryError', 'SolverError', 'FileError',
    'DataError',

    # Tools
    'read_json', 'save_json', 'save_csv', 'read_csv', 'format_float',
    'ensure_directory_exists', 'load_app_info',

    # Validation
    'is_numeric', 'is_positive_number', 'is_non_negative_number', 'is_in_range',
    'is_not_empty', 'is_valid_choice', 'validate_list_not_empty', 'reject_unknown_keys',

    # Configuration
    'CaseConfig', 'parse_config', 'load_config', 'config_from_dict', 'apply_override',

    # Logging
    'Logger',
]
