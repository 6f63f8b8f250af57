"""Damped Gauss-Newton (Levenberg-Marquardt) least-squares engine."""

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import IllConditioned, InvalidInput, NonFiniteInput

MAX_ITER = 500
XTOL = 1e-8
GTOL = 1e-10
LAMBDA0 = 1e-3
LAMBDA_UP = 10.0
LAMBDA_DOWN = 3.0
LAMBDA_MAX = 1e20
FD_REL_STEP = 1e-6
# smallest singular value of the scaled Jacobian relative to the largest
SINGULAR_RTOL = 1e-10


@dataclass
class FitResult:
    """Outcome of a least-squares fit.

    ``stderr`` is ``None`` when the fit did not converge. ``derived`` holds
    quantities computed from the parameters (e.g. a Rabi pi-time) and
    ``flags`` lists human-readable warnings about the solution.
    """

    params: dict
    stderr: dict | None
    residual_norm: float
    converged: bool
    iterations: int
    model: str = ""
    n_points: int = 0
    covariance: np.ndarray | None = field(default=None, repr=False)
    derived: dict = field(default_factory=dict)
    flags: list = field(default_factory=list)

    def __getitem__(self, name):
        return self.params[name]

    @property
    def residual_rms(self):
        return self.residual_norm / math.sqrt(self.n_points) if self.n_points else 0.0


def central_difference_jacobian(fun, p, rel_step=FD_REL_STEP):
    """Jacobian of the vector function ``fun`` at ``p`` by central differences.

    The step for parameter ``i`` is ``rel_step * scale_i`` with
    ``scale_i = max(|p_i|, 1e-3 * max_j |p_j|)``.
    """
    p = np.asarray(p, dtype=float)
    floor = max(1e-3 * float(np.max(np.abs(p))), 1e-12) if p.size else 1e-12
    scale = np.maximum(np.abs(p), floor)
    cols = []
    for i in range(p.size):
        h = rel_step * scale[i]
        up, down = p.copy(), p.copy()
        up[i] += h
        down[i] -= h
        cols.append((fun(up) - fun(down)) / (2 * h))
    return np.column_stack(cols)


def levenberg_marquardt(
    residuals,
    p0,
    jacobian=None,
    max_iter=MAX_ITER,
    xtol=XTOL,
    gtol=GTOL,
    lambda0=LAMBDA0,
):
    """Minimize ``sum(residuals(p)**2)`` starting at ``p0``.

    Uses Marquardt's diagonal scaling ``(J^T J + lam * diag(J^T J)) dp = -J^T r``
    with ``lam`` multiplied by 10 on rejected and divided by 3 on accepted
    steps. Converges when every component of the step satisfies
    ``|dp_i| <= xtol * (|p_i| + xtol)`` or when ``max|J^T r| < gtol``.

    Returns ``(p, r, J, converged, iterations)``; ``J`` is evaluated at ``p``.
    """
    p = np.array(p0, dtype=float)
    if not np.all(np.isfinite(p)):
        raise NonFiniteInput("initial guess must be finite")
    if jacobian is None:
        def jacobian(q):
            return central_difference_jacobian(residuals, q)

    r = _safe_eval(residuals, p)
    if r is None:
        raise InvalidInput("model is not finite at the initial guess")
    cost = float(r @ r)
    lam = lambda0
    converged = False
    iterations = 0
    J = jacobian(p)

    while iterations < max_iter:
        iterations += 1
        g = J.T @ r
        if float(np.max(np.abs(g))) < gtol:
            converged = True
            break
        A = J.T @ J
        d = np.diag(A).copy()
        d = np.maximum(d, 1e-12 * max(float(d.max()), 1e-300))
        accepted = False
        small_step = False
        while lam <= LAMBDA_MAX:
            try:
                step = np.linalg.solve(A + lam * np.diag(d), -g)
            except np.linalg.LinAlgError:
                lam *= LAMBDA_UP
                continue
            small_step = bool(np.all(np.abs(step) <= xtol * (np.abs(p) + xtol)))
            p_new = p + step
            r_new = _safe_eval(residuals, p_new)
            if r_new is not None:
                with np.errstate(over="ignore"):
                    cost_new = float(r_new @ r_new)
                if cost_new < cost:
                    p, r, cost = p_new, r_new, cost_new
                    lam /= LAMBDA_DOWN
                    accepted = True
                    break
            lam *= LAMBDA_UP
            if small_step:
                break
        if small_step:
            converged = True
            if accepted:
                J = jacobian(p)
            break
        if not accepted:
            # damping exhausted without progress
            break
        J = jacobian(p)

    return p, r, J, converged, iterations


def _safe_eval(fun, p):
    try:
        with np.errstate(all="ignore"):
            r = np.asarray(fun(p), dtype=float)
    except (ValueError, ArithmeticError):
        return None
    if not np.all(np.isfinite(r)):
        return None
    return r


def covariance_matrix(J, residual, n_params):
    """Residual-variance-scaled covariance ``s^2 (J^T J)^-1``.

    Raises IllConditioned when ``J`` is numerically rank deficient after
    column scaling.
    """
    n = residual.size
    norms = np.linalg.norm(J, axis=0)
    if np.any(norms == 0):
        raise IllConditioned("a parameter has no influence on the model")
    Js = J / norms
    s = np.linalg.svd(Js, compute_uv=False)
    if s[-1] <= SINGULAR_RTOL * s[0]:
        raise IllConditioned(
            f"normal equations are singular (condition {s[0] / max(s[-1], 1e-300):.3g})"
        )
    inv = np.linalg.inv(Js.T @ Js) / np.outer(norms, norms)
    dof = max(n - n_params, 1)
    return inv * float(residual @ residual) / dof


def fit_residuals(model_fn, x, y, p0, names, jacobian_fn=None, model_name="", **kwargs):
    """Fit ``model_fn(x, p)`` to ``y`` and package a FitResult.

    ``jacobian_fn(x, p)`` returns the model Jacobian; central differences are
    used when it is ``None``. IllConditioned raised from here carries the
    best-so-far FitResult as ``.result``.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)

    def residuals(p):
        return model_fn(x, p) - y

    jac = None if jacobian_fn is None else (lambda p: jacobian_fn(x, p))
    p, r, J, converged, iterations = levenberg_marquardt(residuals, p0, jac, **kwargs)
    result = FitResult(
        params=dict(zip(names, (float(v) for v in p))),
        stderr=None,
        residual_norm=float(np.linalg.norm(r)),
        converged=converged,
        iterations=iterations,
        model=model_name,
        n_points=int(y.size),
    )
    if not converged:
        result.flags.append(f"not converged after {iterations} iterations")
        return result
    try:
        cov = covariance_matrix(J, r, len(names))
    except IllConditioned as exc:
        exc.result = result
        raise
    result.covariance = cov
    result.stderr = dict(zip(names, (float(v) for v in np.sqrt(np.clip(np.diag(cov), 0, None)))))
    for name in names:
        if result.stderr[name] > abs(result.params[name]):
            result.flags.append(f"{name} poorly determined (stderr exceeds value)")
    return result
