def __getattr__(name):
    if name in ("Clause", "ExactCoverInstance", "classical_energy", "count_solutions", "degree"):
        from exact_cover import instance

        return getattr(instance, name)
    if name == "generate_hard_instance":
        from exact_cover.generator import generate_hard_instance

        return generate_hard_instance
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")

__all__ = [
    "Clause",
    "ExactCoverInstance",
    "classical_energy",
    "count_solutions",
    "degree",
    "generate_hard_instance",
]
