"""
Data validation functions for GradPlast.

This module contains the field validators used by the configuration layer.
Each function performs a specific validation and returns True or raises a
ValidationError naming the offending field.
"""

import math
from typing import Any, Iterable, List, Union

from .errorhandler import ConfigError, ErrorCode, ValidationError

Number = Union[str, int, float]


def is_numeric(value: Number, field_name: str = "Value") -> bool:
    """
    Check if value is a finite number.

    Args:
        value: Value to check
        field_name: Name of the field for error message

    Returns:
        bool: True if value is numeric

    Raises:
        ValidationError: If value is empty, not numeric or not finite
    """
    if value is None or value == "":
        raise ValidationError(
            ErrorCode.VALID_EMPTY_FIELD,
            f"{field_name} cannot be empty"
        )

    # bool is an int subclass, but "true" is never a physical quantity
    if isinstance(value, bool):
        raise ValidationError(
            ErrorCode.VALID_NOT_NUMERIC,
            f"{field_name} is not numeric: {value}"
        )

    try:
        num_value = float(value)
    except (ValueError, TypeError):
        raise ValidationError(
            ErrorCode.VALID_NOT_NUMERIC,
            f"{field_name} is not numeric: {value}"
        )

    if not math.isfinite(num_value):
        raise ValidationError(
            ErrorCode.VALID_NOT_NUMERIC,
            f"{field_name} must be finite: {value}"
        )

    return True


def is_positive_number(value: Number, field_name: str = "Value") -> bool:
    """
    Check if value is a strictly positive number.

    Raises:
        ValidationError: If value is not positive
    """
    is_numeric(value, field_name)

    num_value = float(value)
    if num_value <= 0:
        raise ValidationError(
            ErrorCode.VALID_OUT_OF_RANGE,
            f"{field_name} must be positive: {num_value}"
        )

    return True


def is_non_negative_number(value: Number, field_name: str = "Value") -> bool:
    """
    Check if value is a number greater than or equal to zero.

    Raises:
        ValidationError: If value is negative
    """
    is_numeric(value, field_name)

    num_value = float(value)
    if num_value < 0:
        raise ValidationError(
            ErrorCode.VALID_OUT_OF_RANGE,
            f"{field_name} must be non-negative: {num_value}"
        )

    return True


def is_in_range(value: Number, min_val: float, max_val: float,
                field_name: str = "Value", min_inclusive: bool = True) -> bool:
    """
    Check if value is within specified range.

    Args:
        value: Value to check
        min_val: Minimum allowed value
        max_val: Maximum allowed value (always inclusive)
        field_name: Name of the field for error message
        min_inclusive: Whether min_val itself is allowed

    Returns:
        bool: True if value is in range

    Raises:
        ValidationError: If value is out of range
    """
    is_numeric(value, field_name)

    num_value = float(value)
    low_ok = num_value >= min_val if min_inclusive else num_value > min_val
    if not (low_ok and num_value <= max_val):
        bracket = "[" if min_inclusive else "("
        raise ValidationError(
            ErrorCode.VALID_OUT_OF_RANGE,
            f"{field_name} = {num_value} must be in {bracket}{min_val}, {max_val}]"
        )

    return True


def is_not_empty(value: str, field_name: str = "Field") -> bool:
    """
    Check if string is not empty or whitespace.

    Raises:
        ValidationError: If value is empty
    """
    if not value or not isinstance(value, str) or not value.strip():
        raise ValidationError(
            ErrorCode.VALID_EMPTY_FIELD,
            f"{field_name} cannot be empty"
        )

    return True


def is_valid_choice(value: Any, choices: Iterable[Any], field_name: str = "Field") -> bool:
    """
    Check that value is one of the allowed choices.

    Raises:
        ValidationError: If value is not among the choices
    """
    choices = list(choices)
    if value not in choices:
        raise ValidationError(
            ErrorCode.VALID_INVALID_CHOICE,
            f"{field_name} = {value!r} is not one of {choices}"
        )

    return True


def validate_list_not_empty(items: List[Any], field_name: str = "List") -> bool:
    """
    Check if list is not empty.

    Raises:
        ValidationError: If list is empty
    """
    if not items or len(items) == 0:
        raise ValidationError(
            ErrorCode.VALID_EMPTY_FIELD,
            f"{field_name} cannot be empty"
        )

    return True


def reject_unknown_keys(data: dict, allowed: Iterable[str], section: str) -> bool:
    """
    Reject keys of a config section that the schema does not know.

    Args:
        data: Section contents as parsed from the config file
        allowed: Accepted key names
        section: Section name for the error message

    Raises:
        ConfigError: Naming the first unknown key (sorted order)
    """
    allowed = set(allowed)
    unknown = sorted(k for k in data if k not in allowed)
    if unknown:
        raise ConfigError(
            ErrorCode.CFG_UNKNOWN_KEY,
            f"Unknown key '{unknown[0]}' in section '{section}'"
        )

    return True
