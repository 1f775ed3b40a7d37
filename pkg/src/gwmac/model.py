"""Channel, power-allocation and alignment-gain types.

A K-user Gaussian multiple-access channel with an external eavesdropper is a
static snapshot of two real gain vectors: ``h`` toward the legitimate receiver
and ``g`` toward the eavesdropper, with unit-variance noise at both outputs.
Every user splits its power budget over K sub-codewords (K-1 message parts
plus one jamming part) and scales sub-codeword i by 1/gamma[l, i] so that
jamming components align at the receiver while message components align at
the eavesdropper.

All values are immutable after construction; the operations are pure
functions and safe for concurrent use.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "GAIN_FLOOR",
    "ChannelState",
    "PowerAllocation",
    "ScalingFactors",
    "compute_scaling_factors",
    "equal_power_allocation",
    "validate_power_allocation",
]

# Gains below this magnitude are treated as zero: the alignment gains divide
# by g_i, and near-zero gains silently overflow the scaled powers.
GAIN_FLOOR = 1e-9

# Relative slack for the per-row power budget check; equal splits must pass
# despite P/K rounding.
_BUDGET_RTOL = 1e-9


def _as_readonly(a) -> np.ndarray:
    out = np.array(a, dtype=float)
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class ChannelState:
    """Receiver and eavesdropper gain vectors for K >= 2 users."""

    h: np.ndarray
    g: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "h", _as_readonly(self.h))
        object.__setattr__(self, "g", _as_readonly(self.g))
        if self.h.ndim != 1 or self.g.ndim != 1:
            raise ValueError("channel gains must be 1-D vectors")
        if len(self.h) != len(self.g):
            raise ValueError(
                f"gain vectors differ in length: {len(self.h)} vs {len(self.g)}"
            )
        if len(self.h) < 2:
            raise ValueError("need at least 2 users")
        if not (np.all(np.isfinite(self.h)) and np.all(np.isfinite(self.g))):
            raise ValueError("channel gains must be finite")
        small = min(np.min(np.abs(self.h)), np.min(np.abs(self.g)))
        if small < GAIN_FLOOR:
            raise ValueError(
                f"degenerate channel: gain magnitude {small:g} below {GAIN_FLOOR:g}"
            )

    @property
    def num_users(self) -> int:
        return len(self.h)


@dataclass(frozen=True)
class PowerAllocation:
    """Per-user, per-sub-codeword powers.

    ``split[l, i]`` is the power user l spends on sub-codeword i (linear
    scale, unit noise).  Row sums may stay strictly below the budget; the
    sweep harness always uses the equal split.
    """

    total_power: float
    split: np.ndarray

    def __post_init__(self):
        if not (self.total_power > 0 and np.isfinite(self.total_power)):
            raise ValueError(f"total power must be positive, got {self.total_power!r}")
        object.__setattr__(self, "split", _as_readonly(self.split))
        if self.split.ndim != 2 or self.split.shape[0] != self.split.shape[1]:
            raise ValueError("power split must be a square K x K matrix")
        problem = validate_power_allocation(self)
        if problem is not None:
            raise ValueError(problem)

    @property
    def num_users(self) -> int:
        return self.split.shape[0]


@dataclass(frozen=True)
class ScalingFactors:
    """Alignment gain matrix: gamma[l, i] scales user l's sub-codeword i."""

    gamma: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "gamma", _as_readonly(self.gamma))
        if not np.all(np.isfinite(self.gamma)) or np.any(self.gamma == 0.0):
            raise ValueError("alignment gains must be finite and nonzero")

    @property
    def num_users(self) -> int:
        return self.gamma.shape[0]


def compute_scaling_factors(channel: ChannelState) -> ScalingFactors:
    """Alignment gains for a channel snapshot.

    Diagonal entries equal the receiver gains h_l (jamming alignment at the
    receiver); off-diagonal entries are g_l * h_i / g_i (message alignment at
    the eavesdropper).  Rejects channels with any gain below ``GAIN_FLOOR``.
    """
    h, g = channel.h, channel.g
    gamma = np.outer(g, h / g)
    np.fill_diagonal(gamma, h)
    return ScalingFactors(gamma)


def equal_power_allocation(total_power: float, num_users: int) -> PowerAllocation:
    """Split each user's budget equally over its K sub-codewords."""
    if num_users < 2:
        raise ValueError(f"need at least 2 users, got {num_users}")
    if not (total_power > 0 and np.isfinite(total_power)):
        raise ValueError(f"total power must be positive, got {total_power!r}")
    split = np.full((num_users, num_users), total_power / num_users)
    return PowerAllocation(total_power, split)


def validate_power_allocation(alloc: PowerAllocation) -> str | None:
    """Return None if the allocation is feasible, else a description of the
    first violation (a nonpositive entry, or a row exceeding the budget)."""
    split = np.asarray(alloc.split, dtype=float)
    bad = np.argwhere(~(split > 0))
    if len(bad):
        l, i = bad[0]
        return f"entry ({l},{i}) must be strictly positive, got {split[l, i]!r}"
    budget = alloc.total_power * (1.0 + _BUDGET_RTOL)
    sums = split.sum(axis=1)
    over = np.nonzero(sums > budget)[0]
    if len(over):
        l = over[0]
        return (
            f"row {l} spends {sums[l]!r} which exceeds the budget "
            f"{alloc.total_power!r}"
        )
    return None
