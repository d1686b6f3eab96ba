"""Problem instances: naming, generation, and the on-disk format.

An instance is a board size plus matching start and goal cell lists.
Names follow ``MP{N}{N_A}-{k}``, e.g. MP52-1 for the second generated
5x5 two-agent instance. Because the two numbers are concatenated, some
size pairs would collide (MP816 could be 8x8 with 16 agents or 81x81
with 6); for exactly those pairs the name switches to an explicit
``MP{N}x{N_A}-{k}`` form, and parsing accepts the concatenated form
only when a single size pair explains it.

File format, line oriented: first data line ``N N_A``, then N_A start
rows ``row col``, then N_A goal rows. Blank lines and ``#`` comments are
skipped anywhere. The writer leads with one comment carrying the name
and generation seed so a write/read round trip reproduces the instance
exactly; hand-written files without it get defaults.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from random import Random

from .grid import GridConfig, Position
from .seeds import mix_chain

_NAME_X = re.compile(r"^MP(\d+)x(\d+)-(\d+)$")
_NAME_CAT = re.compile(r"^MP(\d+)-(\d+)$")
_META = re.compile(r"^#gridmcts\s+name=(\S+)\s+gen_seed=(-?\d+)\s*$")


def _size_splits(digits: str) -> list[tuple[int, int]]:
    """All (n, n_agents) readings of a concatenated size string."""
    out = []
    for cut in range(1, len(digits)):
        a, b = digits[:cut], digits[cut:]
        if b.startswith("0") and b != "0":
            continue
        if a.startswith("0"):
            continue
        n, na = int(a), int(b)
        try:
            GridConfig(n, na)
        except ValueError:
            continue
        out.append((n, na))
    return out


def parse_instance_name(name: str) -> tuple[int, int, int]:
    """Recover (n, n_agents, k) from an instance name.

    Rejects concatenated names that more than one size pair could have
    produced; the generator never emits those (it falls back to the
    x-separated form).
    """
    m = _NAME_X.match(name)
    if m:
        return int(m.group(1)), int(m.group(2)), int(m.group(3))
    m = _NAME_CAT.match(name)
    if not m:
        raise ValueError(f"malformed instance name {name!r}")
    splits = _size_splits(m.group(1))
    if not splits:
        raise ValueError(f"no valid board size reading for name {name!r}")
    if len(splits) > 1:
        raise ValueError(f"ambiguous instance name {name!r}: could be any of {splits}")
    n, na = splits[0]
    return n, na, int(m.group(2))


def instance_name(n: int, n_agents: int, k: int) -> str:
    """Canonical name for the k-th instance of a size."""
    if k < 0:
        raise ValueError(f"instance index must be non-negative, got {k}")
    GridConfig(n, n_agents)  # validate the size pair itself
    cat = f"MP{n}{n_agents}-{k}"
    if _size_splits(f"{n}{n_agents}") == [(n, n_agents)]:
        return cat
    return f"MP{n}x{n_agents}-{k}"


@dataclass(frozen=True)
class Instance:
    """One concrete problem: a board with start and goal cells.

    Starts are pairwise distinct and so are goals; a start may coincide
    with a goal, which simply means that agent begins captured. Names
    shaped like generator output must agree with the actual board size.
    """

    name: str
    grid: GridConfig
    starts: tuple[Position, ...]
    goals: tuple[Position, ...]
    gen_seed: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "starts", tuple(Position(*p) for p in self.starts))
        object.__setattr__(self, "goals", tuple(Position(*p) for p in self.goals))
        na, n = self.grid.n_agents, self.grid.n
        if len(self.starts) != na:
            raise ValueError(f"expected {na} starts, got {len(self.starts)}")
        if len(self.goals) != na:
            raise ValueError(f"expected {na} goals, got {len(self.goals)}")
        for p in self.starts + self.goals:
            if not (0 <= p.row < n and 0 <= p.col < n):
                raise ValueError(f"cell {p} outside {n}x{n} grid")
        if len(set(self.starts)) != na:
            raise ValueError("start cells must be pairwise distinct")
        if len(set(self.goals)) != na:
            raise ValueError("goal cells must be pairwise distinct")
        if self.name.startswith("MP"):
            pn, pna, _ = parse_instance_name(self.name)
            if (pn, pna) != (n, na):
                raise ValueError(
                    f"name {self.name!r} says {pn}x{pn} with {pna} agents, "
                    f"but the grid is {n}x{n} with {na}"
                )


def generate_instance(n: int, n_agents: int, k: int, seed: int) -> Instance:
    """Deterministically sample the k-th instance of a size family.

    2 * n_agents distinct cells are drawn from the board; the first half
    are starts, the rest goals. The draw stream depends on all of
    (seed, n, n_agents, k), so families never share cells across k.
    """
    grid = GridConfig(n, n_agents)
    rng = Random(mix_chain(seed, n, n_agents, k))
    cells = rng.sample(range(n * n), 2 * n_agents)
    starts = tuple(Position(*divmod(c, n)) for c in cells[:n_agents])
    goals = tuple(Position(*divmod(c, n)) for c in cells[n_agents:])
    return Instance(instance_name(n, n_agents, k), grid, starts, goals, seed)


def write_instance(instance: Instance, path) -> None:
    """Save an instance in the line-oriented text format."""
    lines = [f"#gridmcts name={instance.name} gen_seed={instance.gen_seed}"]
    lines.append(f"{instance.grid.n} {instance.grid.n_agents}")
    for p in instance.starts:
        lines.append(f"{p.row} {p.col}")
    for p in instance.goals:
        lines.append(f"{p.row} {p.col}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")


def read_instance(path) -> Instance:
    """Load an instance; errors point at the offending 1-based line."""
    name = None
    gen_seed = 0
    rows: list[tuple[int, int, int]] = []  # (lineno, a, b)
    for lineno, raw in enumerate(Path(path).read_text(encoding="ascii").splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            m = _META.match(line)
            if m:
                name = m.group(1)
                gen_seed = int(m.group(2))
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected two integers, got {raw!r}")
        try:
            a, b = int(parts[0]), int(parts[1])
        except ValueError:
            raise ValueError(f"line {lineno}: expected two integers, got {raw!r}") from None
        rows.append((lineno, a, b))

    if not rows:
        raise ValueError("line 1: missing size header")
    head_line, n, n_agents = rows[0]
    try:
        grid = GridConfig(n, n_agents)
    except ValueError as e:
        raise ValueError(f"line {head_line}: {e}") from None
    body = rows[1:]
    if len(body) != 2 * n_agents:
        raise ValueError(
            f"line {head_line}: header wants {2 * n_agents} cell rows, file has {len(body)}"
        )
    seen_starts: dict = {}
    seen_goals: dict = {}
    for idx, (lineno, r, c) in enumerate(body):
        if not (0 <= r < n and 0 <= c < n):
            raise ValueError(f"line {lineno}: cell ({r}, {c}) outside {n}x{n} grid")
        seen = seen_starts if idx < n_agents else seen_goals
        if (r, c) in seen:
            raise ValueError(
                f"line {lineno}: cell ({r}, {c}) duplicates line {seen[(r, c)]}"
            )
        seen[(r, c)] = lineno
    cells = [Position(r, c) for _, r, c in body]
    if name is None:
        name = instance_name(n, n_agents, 0)
    return Instance(name, grid, tuple(cells[:n_agents]), tuple(cells[n_agents:]), gen_seed)


def search_space_exponent(n: int, n_agents: int) -> int:
    """Single-agent decisions in a full-horizon episode: 3n turns times
    n_agents. The size family's difficulty label (branching ** this)."""
    return 3 * n * n_agents
