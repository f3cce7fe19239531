from dataclasses import dataclass, field

import numpy as np


@dataclass
class EstimatorResult:
    """Common output of every fitting routine.

    ``final_grad_norm`` holds the solver's stopping statistic: the gradient
    norm for smooth solvers, the last iterate-change norm for alternating
    minimization, the last objective change for IRLS.  ``objective_history``
    is populated only when a config asks for it (used by descent checks).
    """

    beta_hat: np.ndarray
    iterations: int
    final_objective: float
    final_grad_norm: float
    converged: bool
    objective_history: tuple = field(default=(), repr=False)
