def __getattr__(name):
    if name in ("Schedule", "RunConfig"):
        from adiabatic_module import schedule

        return getattr(schedule, name)
    if name in ("AdiabaticEngine", "RunRecord", "run", "trotter_step"):
        from adiabatic_module import engine

        return getattr(engine, name)
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")

__all__ = [
    "Schedule",
    "RunConfig",
    "AdiabaticEngine",
    "RunRecord",
    "run",
    "trotter_step",
]
