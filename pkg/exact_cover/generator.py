"""Hard Exact Cover instances: random clauses added while they shrink the solution set to one."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from itertools import combinations

import numpy as np

from exact_cover.instance import Clause, ExactCoverInstance, SolutionSet
from utils.log_utils import tprint
from utils.settings_store import deep_log, get_setting, is_deep_logging

MIN_GENERATOR_QUBITS = 6
MAX_GENERATOR_QUBITS = 32


class GenerationError(RuntimeError):
    """Raised when every restart of the generator ran out of rejections."""

    def __init__(self, n: int, seed: int, message: str) -> None:
        super().__init__(message)
        self.code = "generation_failed"
        self.n = n
        self.seed = seed


@dataclass
class GenerationTrace:
    """Solution count after each accepted clause plus the work spent to get there."""

    counts: list[int] = field(default_factory=list)
    rejections: int = 0
    restarts: int = 0

    def to_dict(self) -> dict:
        return asdict(self)


def _attempt(
    n: int, seed: int, attempt: int, max_rejections: int, trace: GenerationTrace
) -> list[Clause] | None:
    rng = np.random.default_rng([seed, attempt])
    pool = [Clause(*members) for members in combinations(range(1, n + 1), 3)]
    solutions = SolutionSet(n)
    accepted: list[Clause] = []
    trace.counts = [solutions.count()]
    streak = 0
    while solutions.count() > 1:
        if streak >= max_rejections or not pool:
            return None
        index = int(rng.integers(len(pool)))
        candidate = pool[index]
        new_count = solutions.count_with(candidate)
        if 1 <= new_count < solutions.count():
            solutions.add(candidate)
            accepted.append(candidate)
            pool[index] = pool[-1]
            pool.pop()
            trace.counts.append(new_count)
            streak = 0
            if is_deep_logging():
                deep_log(f"[DEEP][EXACT_COVER] accept {candidate.as_tuple()} -> {new_count} solutions")
        else:
            streak += 1
            trace.rejections += 1
    return accepted


def generate_hard_instance(
    n: int,
    seed: int,
    *,
    max_rejections: int | None = None,
    max_restarts: int | None = None,
) -> ExactCoverInstance:
    """Instance with a unique satisfying assignment, deterministic in (n, seed).

    Clauses are drawn uniformly from the unused ones and kept only if they strictly reduce
    the solution count without reaching zero. After `max_rejections` consecutive rejections
    the attempt restarts from the sub-seed (seed, attempt).
    """
    if not isinstance(n, (int, np.integer)) or not MIN_GENERATOR_QUBITS <= n <= MAX_GENERATOR_QUBITS:
        raise ValueError(f"generator supports {MIN_GENERATOR_QUBITS} <= n <= {MAX_GENERATOR_QUBITS} (got {n})")
    if seed < 0:
        raise ValueError(f"seed must be non-negative (got {seed})")
    rejections = int(max_rejections if max_rejections is not None else get_setting("generator_max_rejections"))
    restarts = int(max_restarts if max_restarts is not None else get_setting("generator_max_restarts"))

    trace = GenerationTrace()
    for attempt in range(restarts + 1):
        clauses = _attempt(n, seed, attempt, rejections, trace)
        if clauses is not None:
            solutions = SolutionSet(n)
            for clause in clauses:
                solutions.add(clause)
            (solution,) = solutions.bitstrings()
            tprint(
                f"[EXACT_COVER][DEBUG] n={n} seed={seed} m={len(clauses)} "
                f"rejections={trace.rejections} restarts={trace.restarts}"
            )
            return ExactCoverInstance(
                n,
                tuple(clauses),
                solution,
                {"seed": seed, "generation": trace.to_dict()},
            )
        trace.restarts += 1
        tprint(f"[EXACT_COVER][WARN] n={n} seed={seed}: attempt {attempt} stalled, restarting")
    raise GenerationError(n, seed, f"no unique-solution instance for n={n} seed={seed} after {restarts + 1} attempts")


def generate_with_clause_count(
    n: int, m_target: int, seed: int, *, max_seeds: int = 1000
) -> ExactCoverInstance:
    """Walk seeds seed, seed+1, ... until a generated instance has exactly m_target clauses."""
    if m_target < 1:
        raise ValueError(f"m_target must be positive (got {m_target})")
    for offset in range(max_seeds):
        instance = generate_hard_instance(n, seed + offset)
        if instance.m == m_target:
            return instance
    raise GenerationError(n, seed, f"no instance with m={m_target} among seeds {seed}..{seed + max_seeds - 1}")
