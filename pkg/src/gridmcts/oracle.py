"""Exact solvers for small boards, used to ground-truth the searcher.

Two independent implementations of the same question ("can every goal
be captured within t steps, and how fast at best?") so each can check
the other: a breadth-first sweep over joint states and an iterative
deepening depth-first search with an admissible distance prune. Both
use the coordinator's joint-move semantics: every agent steps or stays
simultaneously, destinations must be pairwise distinct, locked goals
are impassable, and landing on a free goal captures. Any such joint
move is realizable by the merge rule and vice versa, so the optimal
makespan found here is the true optimum of the executed system.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from itertools import permutations, product

from .grid import CARDINAL_MOVES, Move, Position, manhattan, move_dest
from .scenarios import Instance

_MAX_N = 5
_MAX_AGENTS = 3


@dataclass(frozen=True)
class OracleResult:
    """Verdict of an exact search up to a horizon.

    witness_plan[agent] is that agent's move sequence, one entry per
    turn, reaching full capture in optimal_makespan turns (all empty
    when the instance starts solved). None when the horizon is
    insufficient.
    """

    solvable_within: bool
    optimal_makespan: int | None
    witness_plan: tuple[tuple[Move, ...], ...] | None


def _flatten(instance: Instance):
    starts = tuple(instance.starts)
    goals = frozenset(instance.goals)
    cap0 = tuple(p in goals for p in starts)
    return starts, goals, cap0


def _per_agent(joint_turns, n_agents) -> tuple[tuple[Move, ...], ...]:
    """Reshape a turn-major joint move list into per-agent sequences."""
    if not joint_turns:
        return tuple(() for _ in range(n_agents))
    return tuple(zip(*joint_turns))


def _joint_successors(n, goals, pos, cap):
    """All joint moves: per-agent legal steps with pairwise distinct dests."""
    locked = {p for p, c in zip(pos, cap) if c}
    options = []
    for p, c in zip(pos, cap):
        if c:
            options.append(((Move.STAY, p),))
            continue
        opts = []
        for m in CARDINAL_MOVES:
            q = move_dest(p, m)
            if 0 <= q.row < n and 0 <= q.col < n and q not in locked:
                opts.append((m, q))
        opts.append((Move.STAY, p))
        options.append(tuple(opts))
    for combo in product(*options):
        dests = tuple(q for _, q in combo)
        if len(set(dests)) != len(dests):
            continue
        moves = tuple(m for m, _ in combo)
        new_cap = tuple(
            c or (q in goals) for c, q in zip(cap, dests)
        )
        yield moves, dests, new_cap


def exact_joint_search(instance: Instance, t_final: int) -> OracleResult:
    """Breadth-first search over joint states; exact and minimal.

    Only boards up to 5x5 with at most 3 agents are accepted, the state
    space beyond that is no longer desk-sized.
    """
    n, na = instance.grid.n, instance.grid.n_agents
    if n > _MAX_N or na > _MAX_AGENTS:
        raise ValueError(
            f"joint search handles up to {_MAX_N}x{_MAX_N} and {_MAX_AGENTS} agents, "
            f"got {n}x{n} with {na}"
        )
    if t_final < 0:
        raise ValueError(f"t_final must be non-negative, got {t_final}")
    starts, goals, cap0 = _flatten(instance)
    if all(cap0):
        return OracleResult(True, 0, _per_agent([], na))

    start_key = (starts, cap0)
    parent: dict = {start_key: None}
    frontier = deque([(start_key, 0)])
    while frontier:
        (pos, cap), depth = frontier.popleft()
        if depth >= t_final:
            continue
        for moves, dests, new_cap in _joint_successors(n, goals, pos, cap):
            key = (dests, new_cap)
            if key in parent:
                continue
            parent[key] = ((pos, cap), moves)
            if all(new_cap):
                # walk the parent chain back to the start for the witness
                chain = [moves]
                back = parent[key][0]
                while parent[back] is not None:
                    prev, mv = parent[back]
                    chain.append(mv)
                    back = prev
                chain.reverse()
                return OracleResult(True, depth + 1, _per_agent(chain, na))
            frontier.append((key, depth + 1))
    return OracleResult(False, None, None)


def _nearest_free_goal_bound(pos, cap, goals):
    """Max over live agents of distance to the closest unlocked goal."""
    locked = {p for p, c in zip(pos, cap) if c}
    free = goals - locked
    worst = 0
    for p, c in zip(pos, cap):
        if c:
            continue
        d = min(manhattan(p, g) for g in free)
        if d > worst:
            worst = d
    return worst


def iterative_deepening_search(instance: Instance, t_final: int) -> OracleResult:
    """Same verdict as exact_joint_search via an unrelated algorithm.

    Depth-first with an iteratively raised turn limit. Prunes branches
    whose relaxed single-agent distances already exceed the remaining
    turns (relaxation drops collisions, so it never prunes a real
    solution) and remembers states that failed with at least as many
    turns left. The first limit that succeeds is the optimal makespan.
    """
    n, na = instance.grid.n, instance.grid.n_agents
    if n > _MAX_N or na > _MAX_AGENTS:
        raise ValueError(
            f"joint search handles up to {_MAX_N}x{_MAX_N} and {_MAX_AGENTS} agents, "
            f"got {n}x{n} with {na}"
        )
    if t_final < 0:
        raise ValueError(f"t_final must be non-negative, got {t_final}")
    starts, goals, cap0 = _flatten(instance)
    if all(cap0):
        return OracleResult(True, 0, _per_agent([], na))

    def dfs(pos, cap, left, failed):
        bound = _nearest_free_goal_bound(pos, cap, goals)
        if bound > left:
            return None
        if failed.get((pos, cap), -1) >= left:
            return None
        for moves, dests, new_cap in _joint_successors(n, goals, pos, cap):
            if all(new_cap):
                return [moves]
            if left > 1:
                rest = dfs(dests, new_cap, left - 1, failed)
                if rest is not None:
                    return [moves] + rest
        failed[(pos, cap)] = left
        return None

    floor = _nearest_free_goal_bound(starts, cap0, goals)
    for limit in range(max(floor, 1), t_final + 1):
        found = dfs(starts, cap0, limit, {})
        if found is not None:
            return OracleResult(True, len(found), _per_agent(found, na))
    return OracleResult(False, None, None)


def assignment_lower_bound(instance: Instance) -> int:
    """Best-case makespan ignoring every interaction between agents.

    Minimum over goal assignments of the longest straight-line walk any
    agent would need. Real episodes add collision detours and search
    noise on top, so no run can beat this number.
    """
    na = instance.grid.n_agents
    if na > 8:
        raise ValueError(f"assignment bound enumerates up to 8 agents, got {na}")
    starts, goals, _ = _flatten(instance)
    best = None
    for perm in permutations(sorted(goals)):
        worst = max(manhattan(s, g) for s, g in zip(starts, perm))
        if best is None or worst < best:
            best = worst
    return best
