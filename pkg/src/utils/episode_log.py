"""
Per-seed episode logs (CSV).
"""

from pathlib import Path
from typing import Any, Dict, List, Union

import pandas as pd

EPISODE_COLUMNS: List[str] = [
    "episode",
    "steps",
    "success",
    "final_cost",
    "min_cost",
    "gate_count",
    "rotation_count",
    "cnot_count",
    "depth",
    "epsilon",
    "threshold",
    "wall_time_s",
]


class EpisodeLog:
    """Append-only CSV of episode rows."""

    def __init__(self, path: Union[str, Path]):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)

    def ensure_header(self) -> None:
        if not self.path.exists():
            pd.DataFrame(columns=EPISODE_COLUMNS).to_csv(self.path, index=False)

    def append(self, row: Dict[str, Any]) -> None:
        missing = [c for c in EPISODE_COLUMNS if c not in row]
        if missing:
            raise ValueError(f"Episode row is missing {missing}")
        frame = pd.DataFrame([{c: row[c] for c in EPISODE_COLUMNS}])
        frame.to_csv(self.path, mode="a", header=not self.path.exists(), index=False)

    def read(self) -> pd.DataFrame:
        if not self.path.exists():
            return pd.DataFrame(columns=EPISODE_COLUMNS)
        return pd.read_csv(self.path)

    def truncate(self, last_episode: int) -> int:
        """
        Drop rows past `last_episode`, e.g. before resuming from a checkpoint.

        Returns:
            Number of rows dropped
        """
        if not self.path.exists():
            return 0
        frame = self.read()
        keep = frame[frame["episode"] <= last_episode]
        dropped = len(frame) - len(keep)
        if dropped:
            keep.to_csv(self.path, index=False)
        return dropped
