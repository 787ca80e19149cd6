"""Damped Newton iteration with a forward-difference Jacobian."""

from dataclasses import dataclass

import numpy as np

from .errors import NoConvergenceError, SatjamError, SingularJacobianError


@dataclass
class NewtonResult:
    x: np.ndarray
    residual: np.ndarray
    residual_norm: float
    iterations: int
    converged: bool


def fd_jacobian(fun, x, fx, rel_step=1e-6):
    """Forward differences with step ``rel_step * (1 + |x_i|)``."""
    n = x.shape[0]
    J = np.empty((fx.shape[0], n))
    for i in range(n):
        h = rel_step * (1.0 + abs(x[i]))
        xp = x.copy()
        xp[i] += h
        J[:, i] = (fun(xp) - fx) / (xp[i] - x[i])
    return J


def damped_newton(fun, x0, converged, max_iter=100, max_halvings=20, rel_step=1e-6, jacobian=None):
    """Solve ``fun(x) = 0``.

    ``converged(x, fx)`` decides termination. Each step is backtracked by
    halving until the residual norm decreases (at most ``max_halvings``
    times). ``jacobian(x, fx)`` overrides the finite-difference Jacobian.

    Raises
    ------
    NoConvergenceError
        Iteration limit reached or no descent found; carries the best residual.
    SingularJacobianError
        The Jacobian is singular at the current iterate.
    """
    x = np.array(x0, dtype=float)
    fx = np.asarray(fun(x), dtype=float)
    norm = float(np.linalg.norm(fx))
    for it in range(max_iter + 1):
        if converged(x, fx):
            return NewtonResult(x, fx, norm, it, True)
        if it == max_iter:
            break
        J = jacobian(x, fx) if jacobian is not None else fd_jacobian(fun, x, fx, rel_step)
        if not np.all(np.isfinite(J)):
            raise SingularJacobianError("non-finite Jacobian", iterate=x)
        try:
            dx = np.linalg.solve(J, -fx)
        except np.linalg.LinAlgError:
            raise SingularJacobianError("singular Newton Jacobian", iterate=x) from None
        step = 1.0
        for _ in range(max_halvings + 1):
            xt = x + step * dx
            try:
                ft = np.asarray(fun(xt), dtype=float)
                nt = float(np.linalg.norm(ft))
            except (ArithmeticError, ValueError, SatjamError):
                nt = np.inf
            if np.isfinite(nt) and nt < norm:
                break
            step *= 0.5
        else:
            raise NoConvergenceError("line search found no descent", best_residual=norm, iterate=x)
        x, fx, norm = xt, ft, nt
    raise NoConvergenceError(f"no convergence in {max_iter} iterations", best_residual=norm, iterate=x)
