"""
Versioned checkpoint files.

A checkpoint is a numpy .npz archive. The entry "header" holds a JSON document
with the magic string, the format version and every counter needed to resume;
all other entries are arrays (weights, Adam moments, replay memory).
"""

import json
from pathlib import Path
from typing import Any, Dict, Tuple, Union

import numpy as np

MAGIC = "QASCKPT"
FORMAT_VERSION = 1


def save_checkpoint(
    path: Union[str, Path],
    header: Dict[str, Any],
    arrays: Dict[str, np.ndarray],
) -> Path:
    """
    Write a checkpoint atomically.

    Args:
        path: Target .npz path
        header: JSON-serializable metadata
        arrays: Named arrays; names must not be "header"

    Returns:
        The written path
    """
    if "header" in arrays:
        raise ValueError("'header' is a reserved entry name")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    document = {"magic": MAGIC, "format_version": FORMAT_VERSION, **header}
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "wb") as f:
        np.savez(f, header=np.array(json.dumps(document)), **arrays)
    tmp.replace(path)
    return path


def load_checkpoint(path: Union[str, Path]) -> Tuple[Dict[str, Any], Dict[str, np.ndarray]]:
    """
    Read a checkpoint.

    Returns:
        (header, arrays)

    Raises:
        FileNotFoundError: If the file does not exist
        ValueError: On a foreign file or a format-version mismatch
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Checkpoint not found: {path}")
    with np.load(path, allow_pickle=False) as archive:
        if "header" not in archive.files:
            raise ValueError(f"{path} is not a checkpoint")
        header = json.loads(str(archive["header"]))
        arrays = {name: archive[name] for name in archive.files if name != "header"}
    if header.get("magic") != MAGIC:
        raise ValueError(f"{path} is not a checkpoint")
    if header.get("format_version") != FORMAT_VERSION:
        raise ValueError(
            f"Checkpoint format {header.get('format_version')} is not supported (expected {FORMAT_VERSION})"
        )
    return header, arrays
