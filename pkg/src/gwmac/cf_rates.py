"""Compute-and-forward geometry, effective noise, and equation rates.

The receiver decodes n = K(K-1)+1 integer linear combinations of the
transmitted lattice sub-codewords: one for the aligned jamming aggregate
(slot 0) and one per message sub-codeword (slots 1..n-1, enumerated row-major
over user/sub-codeword pairs).  After MMSE scaling of the observation, the
residual noise of a combination with integer coefficients ``a`` is the
quadratic form (Gamma a)' M^{-1} (Gamma a), where Gamma holds the per-slot
signal amplitudes and M is the MMSE Gram matrix of the power-normalised
receive channel.  Good coefficient vectors are short vectors of that
quadratic form, found by lattice reduction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular
from scipy.optimize import linear_sum_assignment

from .errors import PipelineError
from .lll import Basis, integer_det, lll_reduce
from .model import ChannelState, PowerAllocation, ScalingFactors

__all__ = [
    "CfConfiguration",
    "CoefficientSet",
    "EquationRates",
    "message_pairs",
    "build_configuration",
    "effective_noise_variance",
    "effective_noise_at_beta",
    "select_coefficients",
    "assign_and_rate",
]

# Jamming is reported but never counted in the secure sum, so ties in the
# slot-to-equation assignment resolve toward message slots.
_JAMMING_WEIGHT = 1e-6
_FORBIDDEN_COST = 1e9


def message_pairs(num_users: int) -> tuple[tuple[int, int], ...]:
    """Slot order for message sub-codewords: (user, sub-codeword) pairs in
    row-major order, skipping the jamming diagonal.  Slot s >= 1 maps to
    ``message_pairs(K)[s - 1]``."""
    return tuple(
        (l, i) for l in range(num_users) for i in range(num_users) if i != l
    )


def _readonly(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class CfConfiguration:
    """Derived decoding geometry for one channel/power snapshot.

    gamma_diag[s]  amplitude of slot s: sqrt(slot power / P).  Slot 0 carries
                   the aligned jamming aggregate, whose power is the sum of
                   the users' jamming powers.
    h_tilde        receiver gains repeated per message slot, leading 1 for
                   the jamming slot (used by the capacity-gap diagnostic).
    h_eff          per-slot received amplitude of the power-normalised
                   sub-codewords: h_eff[0] = gamma_diag[0], and for a message
                   slot of user l, h_l * sqrt(P_{l,i} / P).
    mmse_gram      M = (1/P) I + h_eff h_eff'; its inverse defines the
                   effective noise quadratic form (Cholesky factor cached).
    """

    channel: ChannelState
    alloc: PowerAllocation
    scaling: ScalingFactors
    num_users: int
    n: int
    total_power: float
    pairs: tuple[tuple[int, int], ...]
    gamma_diag: np.ndarray
    h_tilde: np.ndarray
    h_eff: np.ndarray
    mmse_gram: np.ndarray
    chol_lower: np.ndarray


@dataclass(frozen=True)
class CoefficientSet:
    """Integer equation coefficients (columns) with their noise variances.

    The column matrix is unimodular, so the n equations are linearly
    independent and solvable for the sub-codewords.  ``noise`` is sorted
    ascending and noise[k] is the effective noise variance of column k.
    """

    columns: np.ndarray
    noise: np.ndarray

    def __post_init__(self):
        cols = np.array(self.columns, dtype=np.int64)
        noise = np.array(self.noise, dtype=float)
        object.__setattr__(self, "columns", _readonly(cols))
        object.__setattr__(self, "noise", _readonly(noise))
        if integer_det(cols) not in (1, -1):
            raise ValueError("coefficient matrix is not unimodular")
        if np.any(np.diff(noise) < 0):
            raise ValueError("noise variances must be sorted ascending")


@dataclass(frozen=True)
class EquationRates:
    """Decodable rate per slot, after pairing slots with equations.

    r_comb[s] is the clipped rate of slot s (s = 0 is jamming); r_comb_raw
    keeps the unclipped values.  assignment[s] is the index into the
    coefficient set of the equation that decodes slot s.
    """

    r_comb: np.ndarray
    r_comb_raw: np.ndarray
    assignment: np.ndarray
    slot_values: np.ndarray

    def __post_init__(self):
        for name in ("r_comb", "r_comb_raw", "slot_values"):
            object.__setattr__(self, name, _readonly(np.array(getattr(self, name), dtype=float)))
        object.__setattr__(self, "assignment", _readonly(np.array(self.assignment, dtype=np.int64)))
        if np.any(self.r_comb < 0):
            raise ValueError("clipped rates must be nonnegative")
        if len(set(self.assignment.tolist())) != len(self.assignment):
            raise ValueError("assignment must pair each slot with a distinct equation")


def build_configuration(
    channel: ChannelState, alloc: PowerAllocation, gamma: ScalingFactors
) -> CfConfiguration:
    """Assemble the decoding geometry from validated model objects."""
    K = channel.num_users
    if alloc.num_users != K or gamma.num_users != K:
        raise ValueError("channel, allocation and scaling factors disagree on K")
    n = K * (K - 1) + 1
    P = alloc.total_power
    pairs = message_pairs(K)
    gm = gamma.gamma
    split = alloc.split

    gamma_diag = np.empty(n)
    h_tilde = np.empty(n)
    h_eff = np.empty(n)
    jam_powers = np.diag(gm) ** 2 * np.diag(split)
    gamma_diag[0] = np.sqrt(np.sum(jam_powers) / P)
    h_tilde[0] = 1.0
    h_eff[0] = gamma_diag[0]
    for s, (l, i) in enumerate(pairs, start=1):
        gamma_diag[s] = np.sqrt(gm[l, i] ** 2 * split[l, i] / P)
        h_tilde[s] = channel.h[l]
        h_eff[s] = channel.h[l] * np.sqrt(split[l, i] / P)

    mmse_gram = np.eye(n) / P + np.outer(h_eff, h_eff)
    try:
        chol_lower = np.linalg.cholesky(mmse_gram)
    except np.linalg.LinAlgError as exc:
        raise PipelineError(
            "configuration", f"MMSE Gram matrix is not positive definite ({exc})"
        ) from exc

    return CfConfiguration(
        channel=channel,
        alloc=alloc,
        scaling=gamma,
        num_users=K,
        n=n,
        total_power=P,
        pairs=pairs,
        gamma_diag=_readonly(gamma_diag),
        h_tilde=_readonly(h_tilde),
        h_eff=_readonly(h_eff),
        mmse_gram=_readonly(mmse_gram),
        chol_lower=_readonly(chol_lower),
    )


def _coeff_vector(config: CfConfiguration, a) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.shape != (config.n,):
        raise ValueError(f"coefficient vector must have length {config.n}")
    return a


def effective_noise_variance(config: CfConfiguration, a) -> float:
    """Residual noise variance of the integer combination ``a`` at the MMSE
    receiver scaling: (Gamma a)' M^{-1} (Gamma a), via one triangular solve
    against the cached Cholesky factor of M."""
    a = _coeff_vector(config, a)
    if not a.any():
        raise ValueError("the zero vector is not an equation")
    u = config.gamma_diag * a
    y = solve_triangular(config.chol_lower, u, lower=True)
    return float(y @ y)


def effective_noise_at_beta(config: CfConfiguration, a, beta: float) -> float:
    """Residual noise variance at an explicit receiver scaling ``beta``:
    P * |beta * h_eff - Gamma a|^2 + beta^2.

    Minimising this over beta reproduces :func:`effective_noise_variance`;
    at beta = 0 only the signal-mismatch term |Gamma a|^2 P remains.
    """
    a = _coeff_vector(config, a)
    mismatch = beta * config.h_eff - config.gamma_diag * a
    return float(config.total_power * (mismatch @ mismatch) + beta * beta)


def select_coefficients(config: CfConfiguration) -> CoefficientSet:
    """Pick n linearly independent integer coefficient vectors by lattice
    reduction of the noise quadratic form.

    An upper-triangular factor R with R'R = Gamma M^{-1} Gamma is reduced
    (delta = 0.75); the unimodular transform's columns, sorted by noise
    variance ascending, are the coefficient vectors.
    """
    factor = solve_triangular(
        config.chol_lower, np.diag(config.gamma_diag), lower=True
    )
    r = np.linalg.qr(factor, mode="r")
    r = r * np.where(np.diag(r) < 0, -1.0, 1.0)[:, None]
    try:
        reduction = lll_reduce(Basis(r), delta=0.75)
    except (ValueError, RuntimeError) as exc:
        raise PipelineError("coefficient-selection", str(exc)) from exc
    u = reduction.transform
    noise = np.sum((r @ u) ** 2, axis=0)
    order = np.argsort(noise, kind="stable")
    return CoefficientSet(columns=u[:, order], noise=noise[order])


def assign_and_rate(
    config: CfConfiguration, coeffs: CoefficientSet
) -> EquationRates:
    """Pair every slot with a distinct equation and rate the pairs.

    An equation can only decode a sub-codeword that participates in it
    (nonzero coefficient), so the pairing is a maximum-total-rate perfect
    matching restricted to nonzero entries of the coefficient matrix; a
    feasible matching always exists because the matrix is unimodular.  The
    jamming slot is rated from the largest single user's jamming power and
    is down-weighted so message slots win any conflict.  Rates clip at zero:
    a non-decodable equation contributes nothing.
    """
    n = config.n
    P = config.total_power
    gm = config.scaling.gamma
    split = config.alloc.split

    slot_values = np.empty(n)
    slot_values[0] = np.max(np.diag(gm) ** 2 * np.diag(split))
    slot_values[1:] = config.gamma_diag[1:] ** 2 * P

    raw = 0.5 * np.log2(slot_values[:, None] / coeffs.noise[None, :])
    weights = np.ones(n)
    weights[0] = _JAMMING_WEIGHT
    cost = -(np.maximum(raw, 0.0) * weights[:, None])
    cost[coeffs.columns == 0] = _FORBIDDEN_COST
    slots, eqs = linear_sum_assignment(cost)

    assignment = np.empty(n, dtype=np.int64)
    r_raw = np.empty(n)
    for s, e in zip(slots, eqs):
        if coeffs.columns[s, e] == 0:
            raise PipelineError(
                "rate-assignment", "no participation-respecting pairing found"
            )
        assignment[s] = e
        r_raw[s] = raw[s, e]

    return EquationRates(
        r_comb=np.maximum(r_raw, 0.0),
        r_comb_raw=r_raw,
        assignment=assignment,
        slot_values=slot_values,
    )
