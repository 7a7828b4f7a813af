def __getattr__(name):
    if name in ("MpsState", "product_state"):
        from mps_module import state

        return getattr(state, name)
    if name == "GateEngine":
        from mps_module.gate_engine import GateEngine

        return GateEngine
    if name == "TransferEnvironment":
        from mps_module.contraction import TransferEnvironment

        return TransferEnvironment
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")

__all__ = [
    "MpsState",
    "product_state",
    "GateEngine",
    "TransferEnvironment",
]
