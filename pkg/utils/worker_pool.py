"""Helpers for running independent jobs concurrently."""

from __future__ import annotations

import concurrent.futures
from collections.abc import Callable, Iterable, Sequence
from typing import TypeVar

from utils.log_utils import tprint

JobT = TypeVar("JobT")
ResultT = TypeVar("ResultT")


def run_bounded(
    target: Callable[[JobT], ResultT],
    jobs: Iterable[JobT],
    *,
    workers: int = 1,
) -> list[ResultT]:
    """Run target over jobs with at most `workers` processes; results keep job order.

    With workers == 1 everything runs inline in the calling process, which keeps
    serial output byte-identical to what a single worker would produce.
    """
    job_list: Sequence[JobT] = list(jobs)
    if workers < 1:
        raise ValueError(f"workers must be >= 1 (got {workers})")
    if workers == 1 or len(job_list) <= 1:
        return [target(job) for job in job_list]

    results: list[ResultT | None] = [None] * len(job_list)
    with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as executor:
        futures = {executor.submit(target, job): index for index, job in enumerate(job_list)}
        for future in concurrent.futures.as_completed(futures):
            index = futures[future]
            try:
                results[index] = future.result()
            except Exception as exc:
                tprint(f"[POOL][ERROR] job {index} failed: {exc}")
                raise
    return results  # type: ignore[return-value]
