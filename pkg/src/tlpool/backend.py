"""Backend selection: compiled extension when built, pure Python otherwise.

The active backend is chosen once at import. Set ``TLPOOL_BACKEND`` to
``compiled`` or ``pure`` to force a choice; forcing ``compiled`` when the
extension is missing is an error rather than a silent downgrade.
"""

import os
from types import ModuleType

from . import _fallback

try:
    from . import _core
except ImportError:  # extension not built; fall back to pure Python
    _core = None

_ENV_VAR = "TLPOOL_BACKEND"


def _select() -> ModuleType:
    forced = os.environ.get(_ENV_VAR)
    if forced is None:
        return _core if _core is not None else _fallback
    if forced == "pure":
        return _fallback
    if forced == "compiled":
        if _core is None:
            raise RuntimeError(
                f"{_ENV_VAR}=compiled but the tlpool._core extension is not built"
            )
        return _core
    raise RuntimeError(f"{_ENV_VAR} must be 'compiled' or 'pure', got {forced!r}")


ACTIVE = _select()


def active_backend() -> str:
    """Name of the backend the package is using ('compiled' or 'pure')."""
    return ACTIVE.BACKEND_NAME


def available_backends() -> tuple[str, ...]:
    return ("compiled", "pure") if _core is not None else ("pure",)


def get_backend(name: str | None = None) -> ModuleType:
    """Resolve a backend module by name; ``None`` means the active one."""
    if name is None:
        return ACTIVE
    if name == "pure":
        return _fallback
    if name == "compiled":
        if _core is None:
            raise RuntimeError("the tlpool._core extension is not built")
        return _core
    raise ValueError(f"unknown backend {name!r}")


def resolve_backend(backend) -> ModuleType:
    """Accept a backend name, an already-resolved module, or ``None``."""
    if backend is None or isinstance(backend, str):
        return get_backend(backend)
    return backend
