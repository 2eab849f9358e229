"""Error types shared across the engine.

Edit errors double as wire rejection reasons: the class name is the
reason string sent back to clients.
"""

from __future__ import annotations


class SlowspaceError(Exception):
    """Base for all engine errors."""


class EditError(SlowspaceError):
    """An edit operation could not be applied; state is unchanged."""

    @property
    def reason(self) -> str:
        return type(self).__name__


class InvalidGrid(EditError):
    pass


class OutOfBounds(EditError):
    pass


class CellFull(EditError):
    pass


class NoSuchItem(EditError):
    pass


class TemplateMismatch(SlowspaceError):
    pass


class MissingTemplate(SlowspaceError):
    pass


class DecodeError(SlowspaceError):
    """Malformed wire bytes. Never raised past the codec boundary as a crash."""

    def __init__(self, position: int, reason: str):
        super().__init__(f"decode error at {position}: {reason}")
        self.position = position
        self.reason = reason


class LocalRejected(SlowspaceError):
    """Optimistic op failed against the local view; nothing was sent."""

    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


class SequenceGap(SlowspaceError):
    """Server sequence jumped; the client must request a fresh snapshot."""


class NotFound(SlowspaceError):
    pass


class CorruptFile(SlowspaceError):
    def __init__(self, violations: list[str]):
        super().__init__("; ".join(violations))
        self.violations = violations


class ReplayError(SlowspaceError):
    def __init__(self, seq: int, detail: str = ""):
        super().__init__(f"replay failed at seq {seq}: {detail}")
        self.seq = seq
