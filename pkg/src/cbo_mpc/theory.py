"""Exact QP oracle and convergence-bound calculators.

For plants whose control enters linearly, each receding-horizon
sub-problem with unit horizon is a box-constrained convex QP

    min_u |phi_s(x) + F_c u - x_ref|^2 + nu |u|^2,   u in box,

solved here exactly by active-set enumeration.  The remaining functions
evaluate the quantitative convergence machinery around that oracle:
growth bounds of the loss, the variance-like diagnostic V*, the Laplace
principle bound, the mass bound delta_r, the variance decay bound, and
the closed-form alpha0 / k_bar parameter choices.  Several constants are
astronomically conservative; log-space variants are provided where the
plain values underflow.
"""

from dataclasses import dataclass
from itertools import product
import math

import numpy as np


@dataclass
class QpSolution:
    """Minimizer with box multipliers and curvature bounds.

    ``eta1`` holds the upper-bound multipliers, ``eta2`` the lower-bound
    ones; at most one of them is nonzero per component.  ``lambda_min_A``
    and ``lambda_max_A`` bound the spectrum of A = F_c^T F_c + nu I.
    """

    u_star: np.ndarray
    eta1: np.ndarray
    eta2: np.ndarray
    lambda_min_A: float
    lambda_max_A: float

    @property
    def eta_norm(self):
        """|eta1| + |eta2|, the multiplier size entering the growth bound."""
        return float(np.linalg.norm(self.eta1) + np.linalg.norm(self.eta2))


class QpObjective:
    """The sub-problem loss as a black-box objective over controls."""

    def __init__(self, plant, x, x_ref_next, nu):
        self.offset = plant.phi_s(x) - np.asarray(x_ref_next, dtype=float).ravel()
        self.F_c = plant.F_c
        self.nu = nu

    def __call__(self, u):
        u = np.asarray(u, dtype=float).ravel()
        r = self.offset + self.F_c @ u
        return float(r @ r + self.nu * (u @ u))

    def batch(self, controls):
        controls = np.atleast_2d(np.asarray(controls, dtype=float))
        r = self.offset + controls @ self.F_c.T
        return np.einsum("ij,ij->i", r, r) + self.nu * np.einsum(
            "ij,ij->i", controls, controls)


def qp_solve(plant, x, x_ref_next, nu):
    """Exact box-constrained minimizer with KKT multipliers.

    Enumerates the 3^d active-set patterns (free / at lower bound / at
    upper bound per component), solves the reduced stationarity system
    for each, and keeps the feasible candidate of least loss.  Strict
    convexity (nu > 0) makes that candidate the unique minimizer.
    """
    if nu <= 0:
        raise ValueError("nu must be positive for a strictly convex sub-problem")
    F_c = plant.F_c
    d = F_c.shape[1]
    lower, upper = plant.box.lower, plant.box.upper
    A = F_c.T @ F_c + nu * np.eye(d)
    misfit = plant.phi_s(x) - np.asarray(x_ref_next, dtype=float).ravel()
    b = -(F_c.T @ misfit)  # stationarity: A u = b
    eigenvalues = np.linalg.eigvalsh(A)
    # F_c^T F_c is positive semi-definite, so nu is a certified floor.
    lambda_min = max(float(eigenvalues[0]), nu)
    lambda_max = float(eigenvalues[-1])

    objective = QpObjective(plant, x, x_ref_next, nu)
    best_value = math.inf
    best_u = None
    best_pattern = None
    for pattern in product((-1, 0, 1), repeat=d):
        u = np.where(np.array(pattern) < 0, lower, upper).astype(float)
        free = [i for i in range(d) if pattern[i] == 0]
        if free:
            fixed = [i for i in range(d) if pattern[i] != 0]
            rhs = b[free] - A[np.ix_(free, fixed)] @ u[fixed] if fixed else b[free]
            u[free] = np.linalg.solve(A[np.ix_(free, free)], rhs)
            if np.any(u[free] < lower[free]) or np.any(u[free] > upper[free]):
                continue
        value = objective(u)
        if value < best_value:
            best_value = value
            best_u = u
            best_pattern = pattern

    gradient = 2.0 * (A @ best_u - b)
    pattern = np.array(best_pattern)
    eta1 = np.where(pattern > 0, np.maximum(-gradient, 0.0), 0.0)
    eta2 = np.where(pattern < 0, np.maximum(gradient, 0.0), 0.0)
    return QpSolution(best_u, eta1, eta2, lambda_min, lambda_max)


def growth_check(qp, plant, x, x_ref_next, nu, u):
    """Slack of the two quadratic growth bounds at a sample point.

    Returns ``(lower_gap, upper_gap)`` where

        lower_gap = L(u) - L(u*) - lambda_min |u - u*|^2
        upper_gap = eta_norm |u - u*| + lambda_max |u - u*|^2 - (L(u) - L(u*))

    Both are nonnegative (up to rounding) for any u in the box.
    """
    objective = QpObjective(plant, x, x_ref_next, nu)
    u = np.asarray(u, dtype=float).ravel()
    excess = objective(u) - objective(qp.u_star)
    dist = float(np.linalg.norm(u - qp.u_star))
    lower_gap = excess - qp.lambda_min_A * dist**2
    upper_gap = qp.eta_norm * dist + qp.lambda_max_A * dist**2 - excess
    return lower_gap, upper_gap


def _positions_of(sample):
    positions = getattr(sample, "positions", sample)
    positions = np.asarray(positions, dtype=float)
    if positions.ndim == 1:
        positions = positions.reshape(-1, 1)
    return positions


def v_star(sample, u_star):
    """Mean Euclidean distance of the agents to the minimizer."""
    positions = _positions_of(sample)
    u_star = np.asarray(u_star, dtype=float).ravel()
    return float(np.linalg.norm(positions - u_star, axis=1).mean())


def mass_estimate(sample, u_star, r):
    """Fraction of agents within distance ``r`` of the minimizer."""
    positions = _positions_of(sample)
    u_star = np.asarray(u_star, dtype=float).ravel()
    return float((np.linalg.norm(positions - u_star, axis=1) <= r).mean())


def laplace_bound(eps, alpha, lambda_min_A, mass_at_R, v_star_value):
    """Consensus-to-minimizer bound from the quantitative Laplace principle.

    eps/2 + exp(-alpha lambda_min (eps/4)^2) / mass_at_R * V*.
    """
    if mass_at_R <= 0:
        raise ValueError("mass_at_R must be positive")
    return eps / 2.0 + math.exp(-alpha * lambda_min_A * (eps / 4.0) ** 2) \
        / mass_at_R * v_star_value


def r_epsilon(eps, lambda_min_A, lambda_max_A, eta_norm):
    """Radius of the ball whose mass enters the Laplace bound."""
    return min(eps**2 * lambda_min_A / (8.0 * (lambda_max_A + eta_norm)), 1.0)


def log_delta_r_bound(r, sigma, tau, d, diam_U):
    """Natural log of :func:`delta_r_bound`; usable when the bound underflows."""
    if r <= 0:
        return -math.inf
    radius = r / (sigma * math.sqrt(tau))
    log_ball = 0.5 * d * math.log(math.pi) - math.lgamma(0.5 * d + 1.0) \
        + d * math.log(radius)
    return -0.5 * diam_U**2 - 0.5 * math.log(2.0 * math.pi * d) + log_ball


def delta_r_bound(r, sigma, tau, d, diam_U):
    """Uniform lower bound on the agent mass within distance r of u*.

    exp(-diam^2 / 2) / sqrt(2 pi d) times the volume of the d-ball of
    radius r / (sigma sqrt(tau)).  Underflows to 0 for large domains; use
    :func:`log_delta_r_bound` in that regime.
    """
    if r <= 0:
        return 0.0
    return math.exp(log_delta_r_bound(r, sigma, tau, d, diam_U))


def vdecay_bound(v0, B, lam, tau, k_bar, sigma):
    """Variance decay: V* after k_bar steps given |consensus - u*| <= B."""
    decay = math.exp(-lam * k_bar * tau)
    return decay * v0 + (B + sigma / (lam * math.sqrt(tau))) * (1.0 - decay)


def alpha0(eps, lambda_min_A, delta_R, diam_U, sigma, lam, tau, log_delta_R=None):
    """Weight exponent sufficient for eps-accurate consensus, any sub-problem.

    (16 / (eps^2 lambda_min)) log((2 / (eps delta_R)) (diam + eps +
    sigma / (lam sqrt(tau)))).  ``log_delta_R`` may be supplied instead of
    ``delta_R`` when the latter underflows.
    """
    if log_delta_R is None:
        log_delta_R = math.log(delta_R)
    inner = math.log(2.0) - math.log(eps) - log_delta_R \
        + math.log(diam_U + eps + sigma / (lam * math.sqrt(tau)))
    return 16.0 / (eps**2 * lambda_min_A) * inner


def alpha0_n(eps, lambda_min_A, delta_R, v0, sigma, lam, tau, log_delta_R=None):
    """Per-problem variant of :func:`alpha0`.

    Replaces the domain diameter with max(V*[f_0], eps + sigma /
    (lam sqrt(tau))), the reachable spread of the warm-started ensemble.
    """
    if log_delta_R is None:
        log_delta_R = math.log(delta_R)
    spread = max(v0, eps + sigma / (lam * math.sqrt(tau)))
    inner = math.log(2.0) - math.log(eps) - log_delta_R + math.log(spread)
    return 16.0 / (eps**2 * lambda_min_A) * inner


def kbar_min(eps, lam, tau, diam_U):
    """Iteration count sufficient to contract the initial spread to eps."""
    return max(0, math.ceil(math.log(diam_U / eps) / (lam * tau)))
