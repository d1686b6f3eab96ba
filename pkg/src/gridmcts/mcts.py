"""Single-agent Monte-Carlo tree search over the joint grid world.

Each agent plans its own next move by building a search tree rooted at
the current world state. Tree levels interleave all agents in a fixed
turn order, the planning agent first and the rest by ascending id, so
one simulated time step spans n_agents consecutive tree levels. The
searcher models everyone but only the root move of the planning agent is
ever executed; the coordinator merges the independently chosen moves.

Node deltas, not full states: every node stores only (agent, move) and
the engine realizes states by applying deltas to one mutable scratch
board with an undo log. Rollouts mutate the same scratch in place and
roll back afterwards, so no N x N grid is ever copied during search.

Leaf evaluation splits its inputs: the playout's final state supplies
the outcome (captured count, planner's own-capture mark) while the
remaining-time bonus is anchored to the evaluated node's own turn, so
shallow nodes outscore deep ones at equal playout outcomes.

Randomness convention (shared with the reference simulator in the test
suite, bit-for-bit): for each live acting agent, let ``nb`` be its
in-bounds cardinal destination cells in UP, DOWN, LEFT, RIGHT order and
``m = len(nb)``. Draw ``j = int(rng.random() * (m + 1))``; ``j == m``
means Stay (always accepted), otherwise candidate ``nb[j]`` is accepted
unless that cell is a locked goal, in which case the draw repeats.
Rejection keeps the distribution exactly uniform over legal moves.
Captured agents act deterministically and consume no randomness.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from random import Random

from .grid import Move, Position, WorldState, apply_move, is_terminal
from .values import NodeStats, UpdateRule, ValueParams, update_value

DEFAULT_EXPLORATION_C = math.sqrt(2)

_STAY = int(Move.STAY)


@lru_cache(maxsize=None)
def _tables(n: int):
    """Per-cell cardinal destinations and their Move values, flat-indexed.

    dests[cell] lists in-bounds neighbor cells in canonical move order;
    moves[cell] holds the matching Move ints. Cached per grid size.
    """
    dests = []
    moves = []
    for cell in range(n * n):
        r, c = divmod(cell, n)
        dd = []
        mm = []
        if r > 0:
            dd.append(cell - n)
            mm.append(int(Move.UP))
        if r < n - 1:
            dd.append(cell + n)
            mm.append(int(Move.DOWN))
        if c > 0:
            dd.append(cell - 1)
            mm.append(int(Move.LEFT))
        if c < n - 1:
            dd.append(cell + 1)
            mm.append(int(Move.RIGHT))
        dests.append(tuple(dd))
        moves.append(tuple(mm))
    return tuple(dests), tuple(moves)


@dataclass(frozen=True)
class SearchBudget:
    """Per-call search effort and episode horizon."""

    iterations: int
    t_final: int
    exploration_c: float = DEFAULT_EXPLORATION_C

    def __post_init__(self) -> None:
        if self.iterations < 1:
            raise ValueError(f"iterations must be positive, got {self.iterations}")
        if self.t_final < 0:
            raise ValueError(f"t_final must be non-negative, got {self.t_final}")
        if self.exploration_c < 0:
            raise ValueError(f"exploration_c must be non-negative, got {self.exploration_c}")


class SearchNode:
    """One node of a plan tree.

    The node's delta is (agent, move): applying that single-agent move to
    the parent's state yields this node's state. The root has no delta
    and carries the full world state plus the search context (planning
    agent, turn order, value parameters) for the whole tree.

    turn_pos indexes the turn order; acting_agent == order[turn_pos] is
    the agent whose alternatives this node's children enumerate. sim_time
    counts whole simulated turns and increments exactly when turn_pos
    wraps to 0.
    """

    __slots__ = (
        "parent",
        "agent",
        "move",
        "dest",
        "acting_agent",
        "turn_pos",
        "sim_time",
        "value",
        "visits",
        "children",
        "state",
        "planning_agent",
        "params",
        "order",
    )

    def __init__(self, parent, agent, move, dest, acting_agent, turn_pos, sim_time):
        self.parent = parent
        self.agent = agent
        self.move = move
        self.dest = dest
        self.acting_agent = acting_agent
        self.turn_pos = turn_pos
        self.sim_time = sim_time
        self.value = 0.0
        self.visits = 0
        self.children = None
        self.state = None
        self.planning_agent = None
        self.params = None
        self.order = None

    @property
    def stats(self) -> NodeStats:
        return NodeStats(self.value, self.visits)

    @property
    def expanded(self) -> bool:
        return self.children is not None

    def tree_root(self) -> "SearchNode":
        node = self
        while node.parent is not None:
            node = node.parent
        return node

    def __repr__(self) -> str:  # debugging aid only
        mv = self.move.name if self.move is not None else "ROOT"
        return (
            f"SearchNode({mv} by {self.agent}, t={self.sim_time}.{self.turn_pos}, "
            f"value={self.value:.4f}, visits={self.visits})"
        )


def make_root(state: WorldState, planning_agent: int, params: ValueParams) -> SearchNode:
    """Fresh unexpanded root for one plan_move call."""
    if not 0 <= planning_agent < state.n_agents:
        raise IndexError(f"planning agent {planning_agent} out of range")
    if params.n_agents != state.n_agents:
        raise ValueError(
            f"params built for {params.n_agents} agents, state has {state.n_agents}"
        )
    root = SearchNode(None, None, None, None, planning_agent, 0, state.t)
    root.state = state
    root.planning_agent = planning_agent
    root.params = params
    root.order = (planning_agent,) + tuple(
        a for a in range(state.n_agents) if a != planning_agent
    )
    return root


class _Sim:
    """Mutable scratch board mirroring one WorldState, flat-indexed."""

    __slots__ = ("n", "n_agents", "pos", "captured", "goal_at", "cap_at",
                 "n_captured", "dests", "moves")

    @classmethod
    def from_state(cls, state: WorldState) -> "_Sim":
        sim = cls()
        n = state.n
        sim.n = n
        sim.n_agents = state.n_agents
        sim.pos = [p.row * n + p.col for p in state.agent_pos]
        sim.captured = [1 if c else 0 for c in state.captured]
        sim.goal_at = bytearray(n * n)
        for g in state.goals:
            sim.goal_at[g.row * n + g.col] = 1
        sim.cap_at = bytearray(n * n)
        for cell, cap in zip(sim.pos, sim.captured):
            if cap:
                sim.cap_at[cell] = 1
        sim.n_captured = sum(sim.captured)
        sim.dests, sim.moves = _tables(n)
        return sim

    def apply_delta(self, agent: int, dest: int) -> int:
        """Move one agent to a flat cell; returns 1 if this captured it.

        Mirrors grid.apply_move: landing on (or staying on) a free goal
        pins the agent. Keep in sync with the inlined copies in
        plan_move; those exist only to cut call overhead in hot loops.
        """
        got = 0
        if self.goal_at[dest] and not self.cap_at[dest] and not self.captured[agent]:
            self.captured[agent] = 1
            self.cap_at[dest] = 1
            self.n_captured += 1
            got = 1
        self.pos[agent] = dest
        return got

    def undo_delta(self, agent: int, old_pos: int, got: int) -> None:
        if got:
            self.captured[agent] = 0
            self.cap_at[self.pos[agent]] = 0
            self.n_captured -= 1
        self.pos[agent] = old_pos


def _replay_sim(node: SearchNode) -> tuple[_Sim, SearchNode]:
    """Scratch board realized at `node` by replaying deltas from the root."""
    chain = []
    cur = node
    while cur.parent is not None:
        chain.append(cur)
        cur = cur.parent
    root = cur
    if root.state is None:
        raise ValueError("node is not attached to a tree built by make_root")
    sim = _Sim.from_state(root.state)
    for nd in reversed(chain):
        sim.apply_delta(nd.agent, nd.dest)
    return sim, root


def select(root: SearchNode, exploration_c: float = DEFAULT_EXPLORATION_C) -> list[SearchNode]:
    """Walk from the root to a leaf by the UCT rule; returns the path.

    At each expanded node the child maximizing
    value + c * sqrt(ln(parent.visits) / child.visits) is taken; an
    unvisited child scores infinite and the first one in creation order
    wins immediately. Ties go to the earliest child, which is canonical
    move order.
    """
    path = [root]
    node = root
    log = math.log
    sqrt = math.sqrt
    while node.children:
        lp = log(node.visits) if node.visits > 0 else 0.0
        best = None
        best_score = -math.inf
        for ch in node.children:
            v = ch.visits
            if v == 0:
                best = ch
                break
            score = ch.value + exploration_c * sqrt(lp / v)
            if score > best_score:
                best_score = score
                best = ch
        node = best
        path.append(node)
    return path


def _expand_on_sim(sim: _Sim, leaf: SearchNode, order) -> SearchNode:
    """Create all children of `leaf` given the scratch realized at it.

    One child per legal move of the acting agent, in canonical move
    order (a captured agent gets the single Stay child). Returns the
    first child.
    """
    tp = leaf.turn_pos
    act = order[tp]
    ntp = tp + 1
    nst = leaf.sim_time
    if ntp == sim.n_agents:
        ntp = 0
        nst += 1
    nact = order[ntp]
    p = sim.pos[act]
    kids = []
    if sim.captured[act]:
        kids.append(SearchNode(leaf, act, Move.STAY, p, nact, ntp, nst))
    else:
        cap_at = sim.cap_at
        for mv, q in zip(sim.moves[p], sim.dests[p]):
            if not cap_at[q]:
                kids.append(SearchNode(leaf, act, Move(mv), q, nact, ntp, nst))
        kids.append(SearchNode(leaf, act, Move.STAY, p, nact, ntp, nst))
    leaf.children = kids
    return kids[0]


def expand(leaf: SearchNode, planning_agent: int) -> SearchNode:
    """Expand a leaf in place; returns its first child.

    Raises if the leaf is already expanded, if the tree was built for a
    different planning agent, or if the leaf is terminal (board fully
    captured or horizon reached).
    """
    if leaf.expanded:
        raise ValueError("node is already expanded")
    sim, root = _replay_sim(leaf)
    if planning_agent != root.planning_agent:
        raise ValueError(
            f"tree was built for planning agent {root.planning_agent}, got {planning_agent}"
        )
    # turn_pos > 0 implies sim_time < t_final: a mid-turn node inherits its
    # parent's sim_time and only non-terminal nodes get expanded
    if sim.n_captured == sim.n_agents or leaf.sim_time >= root.params.t_final:
        raise ValueError("cannot expand a terminal node")
    return _expand_on_sim(sim, leaf, root.order)


def _rollout_core(sim, n_cap, turn_pos, sim_time, t_final, planner, order, alpha, rand):
    """Random playout from the realized scratch; returns the sample value.

    Mutates sim in place and rolls every change back before returning.
    The playout supplies the outcome (captured count and the planner's
    own-capture mark, both read from its final state) while the depth
    bonus is anchored to the evaluated node itself: its turn if it sits
    on a turn boundary, the turn completing around it otherwise. Deep
    nodes therefore score lower than shallow ones at equal playout
    outcomes, which is the entire point of the bonus.
    """
    n_agents = sim.n_agents
    pos = sim.pos
    captured = sim.captured
    goal_at = sim.goal_at
    cap_at = sim.cap_at
    dests = sim.dests

    t = sim_time
    tp = turn_pos
    node_time = t if tp == 0 else t + 1
    if n_cap == n_agents:
        g = n_cap
        mark = captured[planner]
    else:
        undo = []
        done = False
        while t < t_final:
            for i in range(tp, n_agents):
                a = order[i]
                if captured[a]:
                    continue
                p = pos[a]
                nb = dests[p]
                m = len(nb)
                while True:
                    j = int(rand() * (m + 1))
                    if j == m:
                        q = p
                        break
                    q = nb[j]
                    if not cap_at[q]:
                        break
                # q is legal here, so any goal it lands on is free
                if goal_at[q]:
                    captured[a] = 1
                    cap_at[q] = 1
                    n_cap += 1
                    pos[a] = q
                    undo.append((a, p, 1))
                    if n_cap == n_agents:
                        done = True
                        break
                else:
                    pos[a] = q
                    undo.append((a, p, 0))
            tp = 0
            t += 1
            if done:
                break
        g = n_cap
        mark = captured[planner]
        for a, p, got in reversed(undo):
            if got:
                captured[a] = 0
                cap_at[pos[a]] = 0
            pos[a] = p

    # same operation order as value_mod + depth_adjusted, so results are
    # bit-identical to the public value pipeline
    val = g / n_agents
    if mark:
        val -= alpha / n_agents
    val += (1.0 - node_time / t_final) / n_agents
    return val


def rollout(node: SearchNode, budget: SearchBudget, rng: Random) -> float:
    """Score one random playout from `node`'s state; the tree is untouched."""
    sim, root = _replay_sim(node)
    params: ValueParams = root.params
    if budget.t_final != params.t_final:
        raise ValueError(
            f"budget horizon {budget.t_final} disagrees with value params {params.t_final}"
        )
    return _rollout_core(
        sim,
        sim.n_captured,
        node.turn_pos,
        node.sim_time,
        budget.t_final,
        root.planning_agent,
        root.order,
        params.alpha,
        rng.random,
    )


def backpropagate(path: list[SearchNode], value: float, rule: UpdateRule) -> None:
    """Fold one sample into every node on the path.

    Field writes are inlined for speed but must stay equivalent to
    values.update_value; the test suite checks the two against each
    other sample by sample.
    """
    if rule is UpdateRule.MEAN:
        for nd in path:
            k = nd.visits + 1
            if k == 1:
                nd.value = value
            else:
                nd.value = ((k - 1) * nd.value + value) / k
            nd.visits = k
    elif rule is UpdateRule.MAX:
        for nd in path:
            if nd.visits == 0 or value > nd.value:
                nd.value = value
            nd.visits += 1
    else:
        raise ValueError(f"unknown update rule {rule!r}")


def _verify_deltas(root_state: WorldState, path, sim: _Sim) -> None:
    """Cross-check the scratch board against a pure domain-level replay.

    Debug aid for the delta bookkeeping: recomputes the leaf state by
    folding each path delta through apply_move and compares every agent
    position and capture flag against the scratch arrays.
    """
    state = root_state
    for nd in path[1:]:
        state = apply_move(state, nd.agent, nd.move)
    n = state.n
    for i, (p, cap) in enumerate(zip(state.agent_pos, state.captured)):
        flat = p.row * n + p.col
        if sim.pos[i] != flat or bool(sim.captured[i]) != cap:
            raise RuntimeError(
                f"delta replay mismatch for agent {i}: scratch has cell "
                f"{sim.pos[i]} captured={bool(sim.captured[i])}, domain replay "
                f"has cell {flat} captured={cap}"
            )


def best_action(root: SearchNode) -> Move:
    """Highest-valued root move.

    Children are scanned in creation order and only a strictly greater
    value displaces the incumbent, so ties resolve to the earliest move
    in canonical order. Root children all share one sim_time, which
    makes the depth part of the tie rule vacuous here.
    """
    if not root.expanded:
        raise ValueError("root has no children; run the search first")
    best = None
    for ch in root.children:
        if best is None or ch.value > best.value:
            best = ch
    return Move(best.move)


def plan_move(
    state: WorldState,
    planning_agent: int,
    budget: SearchBudget,
    params: ValueParams,
    rng: Random,
    *,
    debug_check_deltas: bool = False,
) -> Move:
    """Choose the planning agent's next move by tree search.

    Runs budget.iterations cycles of select / expand / rollout /
    backpropagate on a fresh tree rooted at `state`, then returns the
    best root move. A captured planning agent short-circuits to Stay
    without consuming any randomness. Raises on a terminal state or if
    budget and params disagree about the horizon or population.
    debug_check_deltas re-derives every realized leaf state through the
    domain layer and fails loudly on any divergence; it is far too slow
    for benchmarking but priceless when touching the undo logic.
    """
    if not 0 <= planning_agent < state.n_agents:
        raise IndexError(f"planning agent {planning_agent} out of range")
    if params.n_agents != state.n_agents:
        raise ValueError(
            f"params built for {params.n_agents} agents, state has {state.n_agents}"
        )
    if budget.t_final != params.t_final:
        raise ValueError(
            f"budget horizon {budget.t_final} disagrees with value params {params.t_final}"
        )
    if state.captured[planning_agent]:
        return Move.STAY
    if is_terminal(state, budget.t_final):
        raise ValueError("cannot plan from a terminal state")

    root = make_root(state, planning_agent, params)
    order = root.order
    sim = _Sim.from_state(state)
    n_agents = sim.n_agents
    t_final = budget.t_final
    alpha = params.alpha
    rule = params.update_rule
    c = budget.exploration_c
    rand = rng.random

    pos = sim.pos
    captured = sim.captured
    goal_at = sim.goal_at
    cap_at = sim.cap_at
    n_cap_root = sim.n_captured

    for _ in range(budget.iterations):
        path = select(root, c)
        leaf = path[-1]

        # realize the leaf on the scratch board (inlined apply_delta)
        undo = []
        n_cap = n_cap_root
        for nd in path[1:]:
            a = nd.agent
            q = nd.dest
            p = pos[a]
            got = 0
            if goal_at[q] and not cap_at[q] and not captured[a]:
                captured[a] = 1
                cap_at[q] = 1
                n_cap += 1
                got = 1
            pos[a] = q
            undo.append((a, p, got))

        if n_cap < n_agents and leaf.sim_time < t_final:
            child = _expand_on_sim(sim, leaf, order)
            path.append(child)
            a = child.agent
            q = child.dest
            p = pos[a]
            got = 0
            if goal_at[q] and not cap_at[q] and not captured[a]:
                captured[a] = 1
                cap_at[q] = 1
                n_cap += 1
                got = 1
            pos[a] = q
            undo.append((a, p, got))
            leaf = child

        if debug_check_deltas:
            _verify_deltas(state, path, sim)

        sample = _rollout_core(
            sim, n_cap, leaf.turn_pos, leaf.sim_time, t_final,
            planning_agent, order, alpha, rand,
        )
        backpropagate(path, sample, rule)

        for a, p, got in reversed(undo):
            if got:
                captured[a] = 0
                cap_at[pos[a]] = 0
            pos[a] = p

    return best_action(root)
