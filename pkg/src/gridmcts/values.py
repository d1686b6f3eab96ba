"""Leaf evaluation and node statistics for the tree search.

All arithmetic here is plain Python numerics with no float-only
operations, so callers may pass ``fractions.Fraction`` throughout and get
exact rational results back. The engine passes floats.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple


class UpdateRule(Enum):
    """How a backpropagated sample folds into a node's running value."""

    MEAN = "mean"
    MAX = "max"


_ALPHAS = (0, 0.5, 1)


@dataclass(frozen=True)
class ValueParams:
    """Shaping knobs shared by every evaluation in one search.

    alpha is the per-agent penalty weight applied when the planning agent
    itself is already sitting on a goal; it discourages plans where the
    planner grabs a goal early and strands the rest. t_final bounds the
    episode and normalizes the completion-time bonus.
    """

    alpha: float
    update_rule: UpdateRule
    n_agents: int
    t_final: int

    def __post_init__(self) -> None:
        if self.alpha not in _ALPHAS:
            raise ValueError(f"alpha must be one of {_ALPHAS}, got {self.alpha}")
        if not isinstance(self.update_rule, UpdateRule):
            raise ValueError(f"update_rule must be an UpdateRule, got {self.update_rule!r}")
        if self.n_agents < 1:
            raise ValueError(f"n_agents must be positive, got {self.n_agents}")
        if self.t_final < 1:
            raise ValueError(f"t_final must be positive, got {self.t_final}")


class NodeStats(NamedTuple):
    """Running value estimate and visit count of one search node."""

    value: float
    visits: int


def value_naive(captured_count: int, n_agents: int):
    """Plain progress score: fraction of agents captured."""
    if not 0 <= captured_count <= n_agents:
        raise ValueError(f"captured_count {captured_count} outside [0, {n_agents}]")
    return captured_count / n_agents


def value_mod(captured_count: int, mark: bool, params: ValueParams):
    """Progress score with the self-capture penalty.

    ``mark`` is true when the planning agent is captured in the evaluated
    state. The penalty alpha/n_agents is subtracted only then; the
    captured count itself still includes every captured agent, the
    planner too.
    """
    base = value_naive(captured_count, params.n_agents)
    if mark:
        return base - params.alpha / params.n_agents
    return base


def depth_adjusted(value, t_current: int, params: ValueParams):
    """Add the completion-time bonus (1/n_agents) * (1 - t/t_final).

    Earlier completions score strictly higher, which steers the search
    toward shallower solutions when raw progress ties. At t == t_final
    the bonus vanishes and the raw value is returned unchanged.
    """
    if not 0 <= t_current <= params.t_final:
        raise ValueError(
            f"t_current {t_current} outside [0, {params.t_final}]"
        )
    return value + (1 - t_current / params.t_final) / params.n_agents


def update_value(stats: NodeStats, sample, rule: UpdateRule) -> NodeStats:
    """Fold one backpropagated sample into node statistics.

    MEAN keeps the arithmetic mean of all samples seen; MAX keeps the
    best. A node with zero visits adopts the sample outright under either
    rule (a fresh node has no estimate to combine with, and seeding MAX
    from an implicit 0.0 would mask negative samples).
    """
    if stats.visits < 0:
        raise ValueError(f"negative visit count {stats.visits}")
    k = stats.visits + 1
    if stats.visits == 0:
        return NodeStats(sample, 1)
    if rule is UpdateRule.MEAN:
        return NodeStats(((k - 1) * stats.value + sample) / k, k)
    if rule is UpdateRule.MAX:
        new = stats.value if stats.value >= sample else sample
        return NodeStats(new, k)
    raise ValueError(f"unknown update rule {rule!r}")
