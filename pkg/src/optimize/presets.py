"""
Named Adam-SPSA hyperparameter sets for small-molecule VQE.

Each name is `<molecule>-<qubits>`. The staged presets split their budget
into three stages; max_fevals is raised to the stage sum where the staged
split exceeds the single-stage budget. Each preset also records the shot
count its gains were tuned under.
"""

from typing import Dict

from .types import SpsaParams

_ROWS = {
    # name: (a, alpha, beta1, beta2, c, gamma_sp, lambda, single-stage budget, stages, shots)
    "H2-2": (1.2104, 0.9531, 0.9414, 0.9983, 0.1039, 0.0984, 0.9277, 500, [500], 10 ** 3),
    "H2-3": (0.5188, 0.9859, 0.7160, 0.6265, 0.0938, 0.0974, 0.6483, 500, [500], 10 ** 4),
    "LiH-4": (1.2324, 0.9709, 0.6114, 0.9326, 0.2215, 0.1485, 0.9772, 1600, [1191, 357, 119], 10 ** 6),
    "LiH-4-long": (1.2324, 0.9709, 0.6114, 0.9326, 0.2215, 0.1485, 0.9772, 3300, [2383, 715, 238], 10 ** 6),
    "LiH-6": (1.7564, 0.8365, 0.6841, 0.9048, 0.1068, 0.1549, 0.1223, 2000, [1430, 429, 143], 10 ** 8),
}


def _build(row) -> SpsaParams:
    a, alpha, beta1, beta2, c, gamma_sp, lam, budget, stages, shots = row
    return SpsaParams(
        a=a,
        alpha=alpha,
        beta1=beta1,
        beta2=beta2,
        c=c,
        gamma_sp=gamma_sp,
        lam=lam,
        max_fevals=max(budget, sum(stages)),
        stages=list(stages),
        shots=shots,
    )


SPSA_PRESETS: Dict[str, SpsaParams] = {name: _build(row) for name, row in _ROWS.items()}


def get_preset(name: str) -> SpsaParams:
    """
    Look up a preset by name.

    Raises:
        KeyError: For an unknown name
    """
    try:
        return SPSA_PRESETS[name]
    except KeyError:
        raise KeyError(f"Unknown SPSA preset {name!r}; available: {', '.join(SPSA_PRESETS)}") from None
