"""Two-stage refitting and error ratios for recovered signals."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .core import Instance
from .adm import dual_objective


@dataclass(frozen=True, eq=False)
class EvalResult:
    """Error ratios and support bookkeeping for one recovered signal.

    rho2_orig rates the raw estimate, rho2 the two-stage refit; both divide
    the squared error by the ideal risk sum_j min(beta_j^2, sigma^2).
    oversized_support flags a truncated support larger than n (the refit is
    then the minimum-norm least-squares solution).
    """

    rho2_orig: float
    rho2: float
    support_estimated: np.ndarray
    support_true: np.ndarray
    true_positives: int
    false_positives: int
    oversized_support: bool = False


class FeasibilityReport(NamedTuple):
    primal_violation: float
    dual_violation: float
    gap: float


def two_stage(beta_tilde: np.ndarray, inst: Instance, sigma_noise: float) -> np.ndarray:
    """Truncate entries with magnitude <= 2 sigma, then refit by least squares.

    The refit solves min ||y - X_T b||_2 on the surviving support T (minimum
    norm solution when X_T is rank-deficient, including |T| > n); entries off
    T stay zero.  An empty T returns the zero vector.
    """
    if not sigma_noise > 0:
        raise ValueError(f"sigma_noise must be positive, got {sigma_noise}")
    beta_tilde = np.asarray(beta_tilde, dtype=np.float64)
    if beta_tilde.shape != (inst.p,):
        raise ValueError(f"beta_tilde must have length {inst.p}, got {beta_tilde.shape}")
    support = np.flatnonzero(np.abs(beta_tilde) > 2.0 * sigma_noise)
    beta_hat = np.zeros(inst.p)
    if support.size:
        coef, *_ = np.linalg.lstsq(inst.X[:, support], inst.y, rcond=None)
        beta_hat[support] = coef
    return beta_hat


def rho_metrics(beta_est: np.ndarray, beta_true: np.ndarray, sigma_noise: float) -> float:
    """sum_j (beta_est_j - beta_true_j)^2 / sum_j min(beta_true_j^2, sigma^2)."""
    beta_est = np.asarray(beta_est, dtype=np.float64)
    beta_true = np.asarray(beta_true, dtype=np.float64)
    if beta_est.shape != beta_true.shape:
        raise ValueError(
            f"estimate and truth must have equal shapes, got {beta_est.shape} vs {beta_true.shape}"
        )
    denom = float(np.minimum(beta_true**2, sigma_noise**2).sum())
    if denom == 0.0:
        raise ValueError("ideal risk is zero (beta_true = 0 and sigma = 0)")
    return float(((beta_est - beta_true) ** 2).sum()) / denom


def feasibility_report(inst: Instance, beta: np.ndarray, lam: np.ndarray) -> FeasibilityReport:
    """Positive parts of the primal/dual constraint violations and the duality gap."""
    beta = np.asarray(beta, dtype=np.float64)
    lam = np.asarray(lam, dtype=np.float64)
    if beta.shape != (inst.p,) or lam.shape != (inst.p,):
        raise ValueError(
            f"beta and lambda must have length {inst.p}, got {beta.shape} and {lam.shape}"
        )
    corr = inst.X.T @ (inst.X @ beta - inst.y)
    primal = max(float(np.abs(corr / inst.d).max()) - inst.delta, 0.0)
    dual = max(float(np.abs(inst.X.T @ (inst.X @ lam)).max()) - 1.0, 0.0)
    gap = abs(float(np.abs(beta).sum()) - dual_objective(inst, lam))
    return FeasibilityReport(primal_violation=primal, dual_violation=dual, gap=gap)


def evaluate_solution(
    inst: Instance,
    beta_tilde: np.ndarray,
    beta_true: np.ndarray,
    sigma_noise: float,
    beta_hat: np.ndarray | None = None,
) -> EvalResult:
    """Bundle the raw and two-stage error ratios against the known truth."""
    if beta_hat is None:
        beta_hat = two_stage(beta_tilde, inst, sigma_noise)
    beta_true = np.asarray(beta_true, dtype=np.float64)
    support_est = np.flatnonzero(np.abs(beta_tilde) > 2.0 * sigma_noise)
    support_true = np.flatnonzero(beta_true)
    true_set = set(support_true.tolist())
    tp = sum(1 for j in support_est.tolist() if j in true_set)
    return EvalResult(
        rho2_orig=rho_metrics(beta_tilde, beta_true, sigma_noise),
        rho2=rho_metrics(beta_hat, beta_true, sigma_noise),
        support_estimated=support_est,
        support_true=support_true,
        true_positives=tp,
        false_positives=support_est.size - tp,
        oversized_support=support_est.size > inst.n,
    )
