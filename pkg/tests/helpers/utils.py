"""Helper utilities for unittests."""

import contextlib
import os
import tempfile


@contextlib.contextmanager
def named_temporary_file(**kwargs):
    """A named temp file that reports can be written to by name.

    The file is closed-safe: callers may `.close()` it and reopen it by
    `.name` (needed on Windows), it is still removed when the `with` scope
    exits.
    """
    for forced in ("mode", "delete"):
        value = kwargs.pop(forced, None)
        if value is not None:
            raise RuntimeError(
                f"'{forced}' argument should not be provided to 'named_temporary_file', got {value}."
            )
    with tempfile.NamedTemporaryFile(mode="w", delete=False, **kwargs) as f:
        try:
            yield f
        finally:
            os.unlink(f.name)


@contextlib.contextmanager
def eigenbound_env(**values):
    """Set EIGENBOUND_<NAME> variables for the duration of the block."""
    current_env = dict(os.environ)
    for name, value in values.items():
        os.environ[f"EIGENBOUND_{name.upper()}"] = str(value)
    try:
        yield
    finally:
        os.environ.clear()
        os.environ.update(current_env)
