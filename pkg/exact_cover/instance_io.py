"""Text format for Exact Cover instances.

    n m
    i j k        (m lines, 1-based)
    # solution 0100...   (optional; other '#' lines are ignored)
"""

from __future__ import annotations

from pathlib import Path

from exact_cover.instance import Clause, ExactCoverInstance, classical_energy

SOLUTION_PREFIX = "# solution "


class InstanceFormatError(ValueError):
    def __init__(self, line: int, message: str) -> None:
        super().__init__(f"line {line}: {message}")
        self.code = "instance_format"
        self.line = line


def _ints(fields: list[str], line: int) -> list[int]:
    try:
        return [int(value) for value in fields]
    except ValueError as exc:
        raise InstanceFormatError(line, f"expected integers, got {' '.join(fields)!r}") from exc


def parse_instance(text: str) -> ExactCoverInstance:
    header: tuple[int, int] | None = None
    clauses: list[Clause] = []
    solution: str | None = None
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            if line.startswith(SOLUTION_PREFIX.rstrip()) and len(line.split()) == 3:
                solution = line.split()[2]
            continue
        fields = line.split()
        if header is None:
            if len(fields) != 2:
                raise InstanceFormatError(number, f"header must be 'n m', got {line!r}")
            n, m = _ints(fields, number)
            if n < 1 or m < 0:
                raise InstanceFormatError(number, f"invalid header n={n} m={m}")
            header = (n, m)
            continue
        if len(fields) != 3:
            raise InstanceFormatError(number, f"clause must have three indices, got {line!r}")
        members = _ints(fields, number)
        if any(not 1 <= q <= header[0] for q in members):
            raise InstanceFormatError(number, f"index out of range [1, {header[0]}] in {line!r}")
        if len(set(members)) != 3:
            raise InstanceFormatError(number, f"clause indices must be distinct, got {line!r}")
        clauses.append(Clause(*members))
    if header is None:
        raise InstanceFormatError(1, "missing 'n m' header")
    n, m = header
    if len(clauses) != m:
        raise InstanceFormatError(len(text.splitlines()), f"header declares {m} clauses, found {len(clauses)}")
    try:
        instance = ExactCoverInstance(n, tuple(clauses), solution)
    except ValueError as exc:
        raise InstanceFormatError(len(text.splitlines()), str(exc)) from exc
    if solution is not None and classical_energy(instance, solution) != 0:
        raise InstanceFormatError(len(text.splitlines()), f"recorded solution {solution} does not satisfy the instance")
    return instance


def serialize_instance(instance: ExactCoverInstance) -> str:
    lines = [f"{instance.n} {instance.m}"]
    lines.extend(f"{c.i} {c.j} {c.k}" for c in instance.clauses)
    if instance.known_solution is not None:
        lines.append(f"{SOLUTION_PREFIX}{instance.known_solution}")
    return "\n".join(lines) + "\n"


def load_instance(path: str | Path) -> ExactCoverInstance:
    p = Path(path)
    instance = parse_instance(p.read_text(encoding="utf-8"))
    return ExactCoverInstance(instance.n, instance.clauses, instance.known_solution, {"path": str(p)})


def save_instance(path: str | Path, instance: ExactCoverInstance) -> None:
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    p.write_text(serialize_instance(instance), encoding="utf-8")
