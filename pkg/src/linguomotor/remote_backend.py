"""Chat-completions-compatible remote language backend.

Wire contract: POST <base_url>/chat/completions with
{model, messages, tools, tool_choice: "auto"}; the reply's
message.content and message.tool_calls[i].function.{name, arguments}
are parsed into a BackendReply. The credential comes from the
LINGUOMOTOR_API_KEY environment variable and is never logged.
"""

from __future__ import annotations

import json
import os
import threading
from typing import Any, Dict, List, Optional

import requests

from .backend import Backend, BackendReply
from .errors import BackendProtocolError, InvalidAction, TransportError
from .tools import ToolCall, tool_definitions

API_KEY_ENV = "LINGUOMOTOR_API_KEY"

SYSTEM_PROMPT = (
    "You control a 7-joint robot arm and a differential-drive base. "
    "Use the provided tools to execute the operator's commands. Angles are "
    "radians, positions meters, speeds m/s. Ask for clarification when a "
    "command lacks the magnitude you need."
)


class RemoteBackend(Backend):
    name = "remote"

    def __init__(self, base_url: str, model: str, api_key: Optional[str] = None,
                 timeout: float = 30.0):
        if not base_url:
            raise ValueError("remote backend requires a base_url")
        self.base_url = base_url.rstrip("/")
        self.model = model
        self.timeout = timeout
        self._api_key = api_key if api_key is not None else os.environ.get(API_KEY_ENV, "")
        self._session = requests.Session()
        self._cancelled = threading.Event()
        self.messages: List[Dict[str, Any]] = [{"role": "system", "content": SYSTEM_PROMPT}]

    # -- wire helpers --------------------------------------------------

    def _post(self, messages: List[Dict[str, Any]]) -> Dict[str, Any]:
        if self._cancelled.is_set():
            raise TransportError("request cancelled by e-stop")
        headers = {"Content-Type": "application/json"}
        if self._api_key:
            headers["Authorization"] = f"Bearer {self._api_key}"
        body = {
            "model": self.model,
            "messages": messages,
            "tools": tool_definitions(),
            "tool_choice": "auto",
        }
        try:
            resp = self._session.post(
                f"{self.base_url}/chat/completions",
                json=body,
                headers=headers,
                timeout=self.timeout,
            )
        except requests.RequestException as exc:
            raise TransportError(str(exc)) from exc
        if resp.status_code != 200:
            raise TransportError(f"HTTP {resp.status_code}: {resp.text[:200]}")
        try:
            return resp.json()
        except ValueError as exc:
            raise BackendProtocolError(f"non-JSON reply: {exc}") from exc

    @staticmethod
    def _message_of(reply: Dict[str, Any]) -> Dict[str, Any]:
        try:
            return reply["choices"][0]["message"]
        except (KeyError, IndexError, TypeError) as exc:
            raise BackendProtocolError(f"reply missing choices[0].message: {exc}") from exc

    # -- Backend interface ---------------------------------------------

    def complete(self, prompt: str, context: Dict[str, Any]) -> BackendReply:
        state_note = {
            "role": "system",
            "content": "Current robot state: " + json.dumps(context, sort_keys=True),
        }
        self.messages.append({"role": "user", "content": prompt})
        message = self._message_of(self._post(self.messages + [state_note]))
        tool_calls = message.get("tool_calls") or []
        if tool_calls:
            first = tool_calls[0]
            try:
                fn = first["function"]
                name = fn["name"]
                arguments = json.loads(fn["arguments"])
                call_id = first.get("id", "call_remote")
            except (KeyError, TypeError, ValueError) as exc:
                raise BackendProtocolError(f"malformed tool call: {exc}") from exc
            if not isinstance(arguments, dict):
                return BackendReply(refusal=f"InvalidAction: arguments not an object: {arguments!r}")
            try:
                call = ToolCall(tool=name, arguments=arguments, call_id=call_id, source=self.name)
            except InvalidAction as exc:
                return BackendReply(refusal=f"InvalidAction: {exc}")
            # keep the assistant turn in history for the follow-up round
            self.messages.append({
                "role": "assistant",
                "content": message.get("content"),
                "tool_calls": [first],
            })
            return BackendReply(tool_call=call, assistant_text=message.get("content"))
        content = message.get("content")
        if content:
            self.messages.append({"role": "assistant", "content": content})
            return BackendReply(clarification=content)
        raise BackendProtocolError("reply had neither content nor tool_calls")

    def follow_up(self, call: ToolCall, result: Dict[str, Any]) -> str:
        self.messages.append({
            "role": "tool",
            "tool_call_id": call.call_id,
            "name": call.tool,
            "content": json.dumps(result, sort_keys=True),
        })
        message = self._message_of(self._post(self.messages))
        content = message.get("content") or "(no assistant commentary)"
        self.messages.append({"role": "assistant", "content": content})
        return content

    def cancel(self) -> None:
        self._cancelled.set()
        self._session.close()
