"""
Illegal-action tracking.

The tracker keeps the most recent gate on every qubit that no later gate has
touched. Repeating any of them would cancel it, so they are masked out. A new
action evicts every tracked action sharing a qubit with it and is then
tracked itself, so at most N actions are illegal at any time.
"""

from typing import Iterable, List, Optional

import numpy as np

from .actions import Action, ActionSpace, encode_action


class IllegalActionTracker:
    """Incremental form of legal_mask."""

    def __init__(self, n: int):
        self.n = n
        self.illegal: List[Action] = []

    def reset(self) -> None:
        self.illegal = []

    def update(self, action: Action) -> None:
        touched = set(action.qubits)
        self.illegal = [a for a in self.illegal if touched.isdisjoint(a.qubits)]
        self.illegal.append(action)

    def illegal_indices(self) -> List[int]:
        return [encode_action(a) for a in self.illegal]

    def mask(self, space: Optional[ActionSpace] = None) -> np.ndarray:
        """Boolean mask over action indices; True means selectable."""
        if space is None:
            space = ActionSpace(self.n)
        legal = space.allowed.copy()
        legal[self.illegal_indices()] = False
        return legal


def legal_mask(history: Iterable[Action], n: int, space: Optional[ActionSpace] = None) -> np.ndarray:
    """
    Legal actions after an episode's action history.

    Args:
        history: Actions taken so far, in order
        n: Qubit count
        space: Action space with optional CNOT restrictions

    Returns:
        Boolean mask over all action indices
    """
    tracker = IllegalActionTracker(n)
    for action in history:
        tracker.update(action)
    return tracker.mask(space)
