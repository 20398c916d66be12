"""
Generic and reusable utility functions for GradPlast.

This module contains file helpers used across the case runners, the sweep
driver and the CLI. Functions here should be generic and not depend on
the state of any specific run.
"""

import csv
import json
import os
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from .errorhandler import ErrorCode, FileError


def read_json(file_path: str) -> Dict[str, Any]:
    """
    Read and parse a JSON file.

    Args:
        file_path (str): Path to the JSON file

    Returns:
        Dict[str, Any]: Parsed JSON data

    Raises:
        FileError: If the file doesn't exist or is not valid JSON
    """
    if not os.path.exists(file_path):
        raise FileError(ErrorCode.FILE_NOT_FOUND, f"File not found: {file_path}")

    try:
        with open(file_path, 'r', encoding='utf-8') as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise FileError(ErrorCode.FILE_INVALID_FORMAT, f"Invalid JSON in file {file_path}: {e}")


def save_json(data: Dict[str, Any], file_path: str) -> None:
    """
    Save data to a JSON file.

    Args:
        data (Dict[str, Any]): Data to save
        file_path (str): Path where to save the file

    Raises:
        FileError: If the file cannot be written
    """
    try:
        ensure_directory_exists(os.path.dirname(file_path) or ".")
        with open(file_path, 'w', encoding='utf-8', newline='\n') as f:
            json.dump(data, f, indent=4, ensure_ascii=False, sort_keys=True)
            f.write("\n")
    except (PermissionError, OSError) as e:
        raise FileError(ErrorCode.FILE_SAVE_FAILED, f"Could not save file {file_path}: {e}")


def format_float(value: Any) -> str:
    """
    Format a cell for CSV output.

    Floats use 17 significant digits so values survive a text round trip;
    integers and strings are written as they are.
    """
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), '.17g')
    return str(value)


def save_csv(data: Sequence[Sequence[Any]], file_path: str,
             headers: Optional[List[str]] = None) -> None:
    """
    Save data to a CSV file.

    Args:
        data: Data rows to save
        file_path (str): Path where to save the file
        headers (Optional[List[str]]): Optional headers for the CSV

    Raises:
        FileError: If the file cannot be written
    """
    try:
        ensure_directory_exists(os.path.dirname(file_path) or ".")

        with open(file_path, 'w', newline='', encoding='utf-8') as f:
            writer = csv.writer(f, lineterminator='\n')

            if headers:
                writer.writerow(headers)

            for row in data:
                writer.writerow([format_float(v) for v in row])
    except (PermissionError, OSError) as e:
        raise FileError(ErrorCode.FILE_SAVE_FAILED, f"Could not save CSV file {file_path}: {e}")


def read_csv(file_path: str, has_headers: bool = True) -> tuple:
    """
    Read data from a CSV file.

    Args:
        file_path (str): Path to the CSV file
        has_headers (bool): Whether the first row contains headers

    Returns:
        tuple: (headers, data) if has_headers=True, else (None, data)

    Raises:
        FileError: If the file doesn't exist or cannot be parsed
    """
    if not os.path.exists(file_path):
        raise FileError(ErrorCode.FILE_NOT_FOUND, f"CSV file not found: {file_path}")

    try:
        with open(file_path, 'r', encoding='utf-8', newline='') as f:
            data = list(csv.reader(f))
    except (OSError, csv.Error) as e:
        raise FileError(ErrorCode.FILE_INVALID_FORMAT, f"Error reading CSV file {file_path}: {e}")

    if has_headers and data:
        return data[0], data[1:]
    return None, data


def ensure_directory_exists(directory_path: str) -> None:
    """
    Ensure that a directory exists, create it if it doesn't.

    Raises:
        FileError: If the directory cannot be created
    """
    try:
        os.makedirs(directory_path, exist_ok=True)
    except (PermissionError, OSError) as e:
        raise FileError(ErrorCode.FILE_ACCESS_DENIED, f"Could not create directory {directory_path}: {e}")


def load_app_info() -> Dict[str, str]:
    """
    Read application name and version from appinfo.json.

    Returns:
        Dict[str, str]: At least 'app_name' and 'version'
    """
    path = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), 'appinfo.json')
    try:
        return read_json(path)
    except FileError:
        return {"app_name": "GradPlast", "version": "unknown"}
