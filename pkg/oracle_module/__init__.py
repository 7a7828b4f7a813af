def __getattr__(name):
    if name in ("DenseState", "DenseHamiltonian", "dense_apply_gate", "dense_product_state"):
        from oracle_module import dense

        return getattr(dense, name)
    if name in ("OracleReport", "run_oracle_check"):
        from oracle_module import checks

        return getattr(checks, name)
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")

__all__ = [
    "DenseState",
    "DenseHamiltonian",
    "dense_apply_gate",
    "dense_product_state",
    "OracleReport",
    "run_oracle_check",
]
