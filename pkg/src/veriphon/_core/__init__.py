"""SMO solver backends: compiled extension preferred, pure Python otherwise."""

try:
    from ._smo import kkt_violation, solve_smo
    BACKEND = "compiled"
except ImportError:  # extension not built on this platform
    from .smo_py import kkt_violation, solve_smo
    BACKEND = "python"

__all__ = ["solve_smo", "kkt_violation", "BACKEND"]
