"""Grid world for cooperative goal capture.

The arena is an N x N board. Each agent occupies one cell; a set of goal
cells must all end up occupied, one agent per goal. Agents move one cell
per time step (four-way) or stay put. An agent that steps onto an
unoccupied goal is captured there: it never moves again and its cell
becomes impassable to everyone else.

States are immutable; all transition helpers return new states. Time is
owned by the caller: ``apply_move`` repositions a single agent without
touching the clock, and the coordinator advances ``t`` once per joint
turn.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from typing import NamedTuple


class Position(NamedTuple):
    row: int
    col: int


class Move(IntEnum):
    """One-step action. Enum order is the canonical tie-break order."""

    UP = 0
    DOWN = 1
    LEFT = 2
    RIGHT = 3
    STAY = 4


# row/col deltas, indexed by Move value
_DELTAS = ((-1, 0), (1, 0), (0, -1), (0, 1), (0, 0))

CARDINAL_MOVES = (Move.UP, Move.DOWN, Move.LEFT, Move.RIGHT)


def move_dest(pos: Position, move: Move) -> Position:
    """Destination cell of `move` taken from `pos` (bounds not checked)."""
    dr, dc = _DELTAS[move]
    return Position(pos.row + dr, pos.col + dc)


def manhattan(a: Position, b: Position) -> int:
    return abs(a.row - b.row) + abs(a.col - b.col)


@dataclass(frozen=True)
class GridConfig:
    """Board size and population. Goals always equal agents in count;
    passing a different n_goals is rejected, not silently fixed."""

    n: int
    n_agents: int
    n_goals: int | None = None

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ValueError(f"grid size must be at least 2, got {self.n}")
        if self.n_agents < 1:
            raise ValueError(f"need at least one agent, got {self.n_agents}")
        if self.n_goals is None:
            object.__setattr__(self, "n_goals", self.n_agents)
        elif self.n_goals != self.n_agents:
            raise ValueError(
                f"goals must match agents one to one, got {self.n_goals} "
                f"goals for {self.n_agents} agents"
            )
        if 2 * self.n_agents > self.n * self.n:
            raise ValueError(
                f"{self.n_agents} agents need {2 * self.n_agents} distinct "
                f"cells but a {self.n}x{self.n} grid has {self.n * self.n}"
            )


@dataclass(frozen=True)
class WorldState:
    """Snapshot of the board at time ``t``.

    ``captured[i]`` means agent i is pinned to the goal cell it sits on.
    Two live agents may transiently share a cell while a joint move is
    being assembled (single-agent proposals are applied one at a time);
    coordinator outputs are always pairwise distinct. Captured agents can
    never share: each one owns its goal exclusively.
    """

    n: int
    t: int
    agent_pos: tuple[Position, ...]
    goals: frozenset[Position]
    captured: tuple[bool, ...]

    def __post_init__(self) -> None:
        if self.t < 0:
            raise ValueError(f"time must be non-negative, got {self.t}")
        if len(self.captured) != len(self.agent_pos):
            raise ValueError("captured flags and agent positions disagree in length")
        if len(self.goals) != len(self.agent_pos):
            raise ValueError(
                f"{len(self.agent_pos)} agents but {len(self.goals)} goals"
            )
        for cell in list(self.agent_pos) + list(self.goals):
            if not (0 <= cell.row < self.n and 0 <= cell.col < self.n):
                raise ValueError(f"cell {cell} outside {self.n}x{self.n} grid")
        taken: set[Position] = set()
        for i, (pos, cap) in enumerate(zip(self.agent_pos, self.captured)):
            if not cap:
                continue
            if pos not in self.goals:
                raise ValueError(f"agent {i} flagged captured off-goal at {pos}")
            if pos in taken:
                raise ValueError(f"two captured agents share goal {pos}")
            taken.add(pos)

    @property
    def n_agents(self) -> int:
        return len(self.agent_pos)

    def captured_cells(self) -> frozenset[Position]:
        """Goal cells already locked by a captured agent."""
        return frozenset(
            p for p, c in zip(self.agent_pos, self.captured) if c
        )


def initial_state(grid: GridConfig, starts, goals) -> WorldState:
    """Build the t=0 state; agents that start on a goal are captured at once."""
    starts = tuple(Position(*p) for p in starts)
    goal_set = frozenset(Position(*p) for p in goals)
    if len(starts) != grid.n_agents:
        raise ValueError(f"expected {grid.n_agents} starts, got {len(starts)}")
    if len(goal_set) != grid.n_agents:
        raise ValueError(f"expected {grid.n_agents} distinct goals")
    if len(set(starts)) != len(starts):
        raise ValueError("start cells must be pairwise distinct")
    captured = tuple(p in goal_set for p in starts)
    return WorldState(grid.n, 0, starts, goal_set, captured)


def legal_moves(state: WorldState, agent: int) -> tuple[Move, ...]:
    """Moves agent may propose, in canonical order.

    Captured agents only stay. Live agents may stay or step to any
    in-bounds neighbor that is not a locked goal cell. Stepping onto
    another live agent's current cell is allowed at proposal time; the
    coordinator resolves those collisions when merging.
    """
    if not 0 <= agent < state.n_agents:
        raise IndexError(f"agent id {agent} out of range")
    if state.captured[agent]:
        return (Move.STAY,)
    pos = state.agent_pos[agent]
    locked = state.captured_cells()
    out = []
    for m in CARDINAL_MOVES:
        q = move_dest(pos, m)
        if 0 <= q.row < state.n and 0 <= q.col < state.n and q not in locked:
            out.append(m)
    out.append(Move.STAY)
    return tuple(out)


def apply_move(state: WorldState, agent: int, move: Move) -> WorldState:
    """Reposition one agent; capture it if it lands on a free goal.

    ``t`` is untouched. Raises ValueError for a move not in
    ``legal_moves(state, agent)``.
    """
    if move not in legal_moves(state, agent):
        raise ValueError(f"agent {agent} cannot play {move.name} at {state.agent_pos[agent]}")
    dest = move_dest(state.agent_pos[agent], move)
    new_pos = list(state.agent_pos)
    new_pos[agent] = dest
    new_cap = list(state.captured)
    if not new_cap[agent] and dest in state.goals:
        # landing on a goal pins the agent; locked goals were already
        # filtered out of legal_moves, so this goal is free
        new_cap[agent] = True
    return WorldState(state.n, state.t, tuple(new_pos), state.goals, tuple(new_cap))


def success_rate(state: WorldState) -> float:
    """Fraction of agents captured on goals, in [0, 1]."""
    return sum(state.captured) / len(state.captured)


def is_terminal(state: WorldState, t_final: int) -> bool:
    """Episode over: every goal is held, or the deadline has passed."""
    return all(state.captured) or state.t >= t_final
