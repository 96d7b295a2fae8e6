"""Non-error result statuses shared by the optimizers and the noise-free tools."""

from dataclasses import dataclass


@dataclass(frozen=True)
class NotApplicable:
    """A closed form or fast path whose precondition does not hold for the given channel."""

    reason: str

    @property
    def status(self) -> str:
        return "NotApplicable"
