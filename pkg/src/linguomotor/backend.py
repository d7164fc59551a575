"""Backend reply type and the interface both language backends implement."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Dict, Optional

from .tools import ToolCall


@dataclass(frozen=True)
class BackendReply:
    """Exactly one of tool_call / clarification / refusal is populated."""

    tool_call: Optional[ToolCall] = None
    assistant_text: Optional[str] = None   # accompanies tool_call
    clarification: Optional[str] = None
    refusal: Optional[str] = None

    def __post_init__(self):
        populated = sum(x is not None for x in (self.tool_call, self.clarification, self.refusal))
        if populated != 1:
            raise ValueError("BackendReply must populate exactly one variant")

    @property
    def kind(self) -> str:
        if self.tool_call is not None:
            return "tool_call"
        if self.clarification is not None:
            return "clarification"
        return "refusal"


class Backend:
    """One prompt -> one reply; after execution the achieved state goes
    back to the backend as the function response (the on-the-fly loop)."""

    name = "base"

    def complete(self, prompt: str, context: Dict[str, Any]) -> BackendReply:
        raise NotImplementedError

    def follow_up(self, call: ToolCall, result: Dict[str, Any]) -> str:
        """Final assistant message after the tool result is reported back."""
        raise NotImplementedError

    def cancel(self) -> None:
        """Abort any in-flight request (e-stop path). Default: no-op."""
