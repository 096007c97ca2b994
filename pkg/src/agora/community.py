"""In-memory community: users, roles, channels, messages, documents, clock.

The stand-in for a real chat platform. Mutation happens only through the
base-action and execution appliers in the stdlib module, so every state change
in a run is attributable to a trace record.
"""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass, field

from .errors import ParseError


@dataclass
class User:
    display_name: str
    roles: set[str] = field(default_factory=set)


@dataclass
class Channel:
    name: str
    members: set[str] = field(default_factory=set)


@dataclass
class Message:
    id: str
    channel: str
    author: str
    text: str
    at: int = 0
    reactions: dict[str, set[str]] = field(default_factory=dict)


@dataclass
class CommunityState:
    users: dict[str, User] = field(default_factory=dict)
    channels: dict[str, Channel] = field(default_factory=dict)
    roles: set[str] = field(default_factory=set)
    documents: dict[str, str] = field(default_factory=dict)
    messages: list[Message] = field(default_factory=list)  # append-only
    clock: int = 0

    def clone(self) -> "CommunityState":
        return copy.deepcopy(self)

    def display_user(self, user_id: str) -> str:
        u = self.users.get(user_id)
        return u.display_name if u else user_id

    def display_channel(self, channel_id: str) -> str:
        c = self.channels.get(channel_id)
        return c.name if c else channel_id

    def next_message_id(self) -> str:
        return f"m{len(self.messages) + 1}"

    def post_message(self, channel: str, author: str, text: str) -> Message:
        msg = Message(id=self.next_message_id(), channel=channel, author=author,
                      text=text, at=self.clock)
        self.messages.append(msg)
        return msg

    def to_json(self) -> dict:
        return {
            "users": {uid: {"display_name": u.display_name, "roles": sorted(u.roles)}
                      for uid, u in self.users.items()},
            "channels": {cid: {"name": c.name, "members": sorted(c.members)}
                         for cid, c in self.channels.items()},
            "roles": sorted(self.roles),
            "documents": dict(self.documents),
            "messages": [
                {"id": m.id, "channel": m.channel, "author": m.author, "text": m.text,
                 "at": m.at,
                 "reactions": {e: sorted(us) for e, us in sorted(m.reactions.items())}}
                for m in self.messages
            ],
            "clock": self.clock,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "CommunityState":
        if not isinstance(doc, dict):
            raise ParseError("community must be an object")
        unknown = set(doc) - {"users", "channels", "roles", "documents", "messages", "clock"}
        if unknown:
            raise ParseError(f"unknown keys {sorted(unknown)}", "community")
        state = cls()
        for uid, raw in doc.get("users", {}).items():
            state.users[uid] = User(display_name=raw.get("display_name", uid),
                                    roles=set(raw.get("roles", [])))
        for cid, raw in doc.get("channels", {}).items():
            members = set(raw.get("members", []))
            bad = members - set(state.users)
            if bad:
                raise ParseError(f"channel {cid!r} lists non-member users {sorted(bad)}", "community")
            state.channels[cid] = Channel(name=raw.get("name", cid), members=members)
        state.roles = set(doc.get("roles", []))
        state.documents = dict(doc.get("documents", {}))
        state.clock = int(doc.get("clock", 0))
        return state


@dataclass(frozen=True)
class CommunitySnapshot:
    """Read-only view for validation and UI drop-down population."""

    users: tuple[tuple[str, str], ...]      # (id, display name)
    roles: tuple[str, ...]
    channels: tuple[tuple[str, str], ...]   # (id, display name)
    documents: tuple[str, ...]

    def user_ids(self) -> frozenset[str]:
        return frozenset(uid for uid, _ in self.users)

    def channel_ids(self) -> frozenset[str]:
        return frozenset(cid for cid, _ in self.channels)

    def to_json(self) -> dict:
        return {
            "users": [{"id": uid, "label": label} for uid, label in self.users],
            "roles": list(self.roles),
            "channels": [{"id": cid, "label": label} for cid, label in self.channels],
            "documents": list(self.documents),
        }


def snapshot(state: CommunityState) -> CommunitySnapshot:
    return CommunitySnapshot(
        users=tuple(sorted((uid, u.display_name) for uid, u in state.users.items())),
        roles=tuple(sorted(state.roles)),
        channels=tuple(sorted((cid, c.name) for cid, c in state.channels.items())),
        documents=tuple(sorted(state.documents)),
    )


def load_community(text: str) -> CommunityState:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from None
    return CommunityState.from_json(doc)
