"""L-BFGS with Armijo backtracking on the free nodes of the cell problem.

The seed of the two-loop recursion is the modal preconditioner (the t-averaged Hessian),
refactored every precondition_every iterations; without it the seed is gamma / w.
"""

import logging
from collections import deque
from typing import Callable, Deque, Optional, Tuple

import numpy as np

from ..energy.functional import energy_eps
from .cell_problem import CellProblem, MinimizeResult
from .gradient import EnergyModel, check_gradient
from .initializers.initializer_factory import InitializerFactory
from .preconditioner import ModalPreconditioner

logger = logging.getLogger(__name__)

CURVATURE_TOL = 1e-12
GRADIENT_CHECK_DIRECTIONS = 5

Seed = Callable[[np.ndarray], np.ndarray]


def _two_loop(grad: np.ndarray, pairs: Deque[Tuple[np.ndarray, np.ndarray, float]], seed: Seed, scaled: bool) -> np.ndarray:
    """-H grad for the limited-memory inverse Hessian on top of the seed operator."""
    q = grad.copy()
    alphas = []
    for s, y, rho in reversed(pairs):
        alpha = rho * float(s @ q)
        q -= alpha * y
        alphas.append(alpha)
    r = seed(q)
    if scaled:
        s, y, _ = pairs[-1]
        r *= float(s @ y) / float(y @ seed(y))
    for (s, y, rho), alpha in zip(pairs, reversed(alphas)):
        beta = rho * float(y @ r)
        r += (alpha - beta) * s
    return -r


def minimize_energy(cp: CellProblem, initial: Optional[np.ndarray] = None) -> MinimizeResult:
    """Best iterate of the descent; converged is False when the iteration budget runs out.

    The stopping tolerance is max(gradient_tolerance, relative_tolerance * |g0|) with |g0|
    the gradient norm of the start; it is reported as MinimizeResult.tolerance.
    """
    settings = cp.settings
    model = EnergyModel(cp)
    if initial is None:
        initializer = InitializerFactory().create_initializer(cp.initializer, cp.seed)
        initial = initializer.initial_values(cp)
    v = cp.apply_boundary(initial).reshape(-1)

    preconditioner = ModalPreconditioner(cp) if settings.precondition else None

    def refresh(values: np.ndarray) -> None:
        slope, strain, _ = model.densities(values)
        preconditioner.update(slope, strain)

    if preconditioner is not None:
        refresh(v)
        seed: Seed = preconditioner.apply
    else:
        metric = model.weights

        def seed(q: np.ndarray) -> np.ndarray:
            return q / metric

    energy, grad = model.energy_and_gradient(v)
    initial_energy = energy
    history = [energy]
    pairs: Deque = deque(maxlen=settings.history)
    last_step = 1.0
    converged = False
    stop_reason = "max_iterations"
    gnorm = model.gradient_norm(grad)
    tolerance = max(settings.gradient_tolerance, settings.relative_tolerance * gnorm)
    logger.info(
        "Minimizing eps=%g on %dx%d cell from '%s' start, E0=%.12g, |g0|=%.3e, tolerance %.3e",
        cp.eps,
        cp.grid.n_s,
        cp.grid.n_t,
        cp.initializer,
        energy,
        gnorm,
        tolerance,
    )

    iteration = 0
    for iteration in range(settings.max_iterations + 1):
        gnorm = model.gradient_norm(grad)
        if gnorm <= tolerance:
            converged, stop_reason = True, "gradient_tolerance"
            break
        if iteration == settings.max_iterations:
            break
        if settings.gradient_check_every and iteration % settings.gradient_check_every == 0:
            check = check_gradient(cp.field(v.reshape(cp.grid.shape)), cp, GRADIENT_CHECK_DIRECTIONS, model=model)
            if not check.passed():
                logger.warning("Gradient check failed at iteration %d: %.3e", iteration, check.max_relative_error)
        if preconditioner is not None and iteration and settings.precondition_every and iteration % settings.precondition_every == 0:
            refresh(v)

        plain_step = 1.0 if preconditioner is not None else min(1.0, 2.0 * last_step)
        if settings.quasi_newton and pairs:
            direction = _two_loop(grad, pairs, seed, scaled=preconditioner is None)
            step = 1.0
        else:
            direction = -seed(grad)
            step = plain_step
        slope = float(grad @ direction)
        if slope >= 0.0:
            logger.debug("Lost descent at iteration %d; dropping the L-BFGS memory", iteration)
            pairs.clear()
            direction = -seed(grad)
            slope = float(grad @ direction)
            step = plain_step

        for backtrack in range(settings.max_backtracks):
            trial = v + step * direction
            trial_energy = model.energy(trial)
            if trial_energy <= energy + settings.armijo_c * step * slope:
                break
            step *= settings.armijo_factor
        else:
            stop_reason = "line_search"
            logger.warning("Line search failed after %d backtracks at iteration %d", settings.max_backtracks, iteration)
            break
        if backtrack:
            logger.debug("Iteration %d: %d backtracks, step %.3e", iteration, backtrack, step)

        new_energy, new_grad = model.energy_and_gradient(trial)
        assert new_energy <= energy, "Armijo step increased the energy"
        s_vec = trial - v
        y_vec = new_grad - grad
        sy = float(s_vec @ y_vec)
        if sy > CURVATURE_TOL * np.linalg.norm(s_vec) * np.linalg.norm(y_vec):
            pairs.append((s_vec, y_vec, 1.0 / sy))
        v, grad, energy = trial, new_grad, new_energy
        last_step = step
        history.append(energy)
        if (iteration + 1) % settings.log_every == 0:
            logger.debug("Iteration %d: E=%.15g, |g|=%.3e", iteration + 1, energy, model.gradient_norm(grad))

    u_star = cp.field(v.reshape(cp.grid.shape))
    breakdown = energy_eps(u_star, cp.eps)
    if converged:
        logger.info("Converged after %d iterations: E=%.15g, |g|=%.3e", iteration, energy, gnorm)
    else:
        logger.warning("Stopped (%s) after %d iterations: E=%.15g, |g|=%.3e", stop_reason, iteration, energy, gnorm)
    return MinimizeResult(
        u_star=u_star,
        breakdown=breakdown,
        iterations=iteration,
        final_gradient_norm=gnorm,
        converged=converged,
        initial_energy=initial_energy,
        stop_reason=stop_reason,
        energy_history=history,
        tolerance=tolerance,
    )
