import os

DEFAULT_TOL = 1e-9
TOL_ENV = "BISMUT_LAB_TOL"


def default_tol() -> float:
    """Zero tolerance used by every "= 0" decision, overridable via BISMUT_LAB_TOL."""
    raw = os.environ.get(TOL_ENV)
    if raw is None or raw.strip() == "":
        return DEFAULT_TOL
    try:
        value = float(raw)
    except ValueError:
        raise ValueError(f"{TOL_ENV} must be a positive float, got {raw!r}") from None
    if not value > 0:
        raise ValueError(f"{TOL_ENV} must be a positive float, got {raw!r}")
    return value


def resolve_tol(tol) -> float:
    return default_tol() if tol is None else float(tol)
