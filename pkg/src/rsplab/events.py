"""
Events and the execution trace.

A trace is the totally ordered log of one world run.  It carries four kinds
of entries: protocol events (the inputs to the goal checkers), channel
operations (every transmitted term), adversary learns (so the capability
audit can replay knowledge growth), and free-form notes (session aborts,
blocked messages).  Everything a goal checker or audit needs is in the
trace itself.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .terms import Term, encode

# Tags and their arities.  U*/S* events mark handshake progress on the two
# endpoints, OWNER/INTENT/ORDER/AUTHORIZE anchor runs to out-of-band facts,
# the Compromise*/ChannelFraud/FraudOrder markers make partial-compromise
# state visible to the goal exclusions.
EVENT_ARITY = {
    "AUTHORIZE": 1,       # (Sp)
    "OWNER": 2,           # (userId, U)
    "INTENT": 4,          # (userId, mnoId, U, Iac)
    "ORDER": 6,           # (userId, mnoId, S, U, P, Iac)
    "U0": 2,              # (U, S)
    "U1": 4,              # (U, Sa, It, S)
    "U2": 4,              # (U, Sa, Sp, It)
    "U3": 8,              # (U, Sa, Sp, It, k, P, mnoId, Iac)
    "S0": 5,              # (Sa, It, S, mnoId, Iac)
    "S1": 6,              # (U, Sa, Sp, It, mnoId, Iac)
    "S2": 8,              # (U, Sa, Sp, It, k, P, mnoId, Iac)
    "S3": 7,              # (U, Sa, Sp, It, P, S, mnoId)
    "SENT_QS": 1,
    "RECV_QU": 1,
    "CompromiseServer": 1,
    "CompromiseCert": 1,
    "CompromiseMno": 1,
    "ChannelFraud": 1,
    "FraudOrder": 3,      # (mode, claimedUser, U-or-null)
}

CLIENT_TRIGGER_TAGS = {"U0", "U1", "U2", "U3"}
SERVER_TRIGGER_TAGS = {"S0", "S1", "S2", "S3"}


@dataclass(frozen=True)
class Event:
    tag: str
    params: tuple

    def __post_init__(self) -> None:
        arity = EVENT_ARITY.get(self.tag)
        if arity is None:
            raise ValueError(f"unknown event tag {self.tag!r}")
        if len(self.params) != arity:
            raise ValueError(
                f"{self.tag} expects {arity} params, got {len(self.params)}")

    def render(self) -> str:
        return f"{self.tag}({', '.join(encode(p) for p in self.params)})"


@dataclass(frozen=True)
class MessageOp:
    """One term crossing one channel."""
    channel: str          # mno_server_private | user_mno_private | lpa_server_public | lpa_euicc_internal
    direction: str        # e.g. "lpa->server"
    term: Term
    by_adversary: bool = False
    unsafe: bool = False  # test-harness injection that bypassed the gate

    def render(self) -> str:
        who = "adv" if self.by_adversary else "hon"
        return f"[{self.channel}] {self.direction} ({who}) {encode(self.term)}"


@dataclass(frozen=True)
class LearnOp:
    term: Term

    def render(self) -> str:
        return f"learn {encode(self.term)}"


@dataclass(frozen=True)
class Note:
    kind: str             # "abort" | "blocked" | "info"
    who: str
    detail: str

    def render(self) -> str:
        return f"note {self.kind} {self.who}: {self.detail}"


TraceEntry = object  # Event | MessageOp | LearnOp | Note


class Trace:
    """Append-only log plus the little world metadata exclusions need."""

    def __init__(self, adversary_user: str = "user-adv") -> None:
        self.entries: list = []
        self.adversary_user = adversary_user

    def append(self, entry) -> int:
        self.entries.append(entry)
        return len(self.entries) - 1

    def events(self) -> list[tuple[int, Event]]:
        return [(i, e) for i, e in enumerate(self.entries) if isinstance(e, Event)]

    def events_tagged(self, tag: str) -> list[tuple[int, Event]]:
        return [(i, e) for i, e in self.events() if e.tag == tag]

    def render(self) -> str:
        lines = [f"# adversary-user: {self.adversary_user}"]
        for i, entry in enumerate(self.entries):
            lines.append(f"{i:4d}  {entry.render()}")
        return "\n".join(lines)

    # -- helpers used by goal exclusions ------------------------------------

    def marked(self, tag: str) -> set:
        """First params of all marker events with this tag."""
        return {e.params[0] for _, e in self.events_tagged(tag)}

    def adversary_owned_eids(self) -> set:
        from .terms import Atom
        adv = Atom(self.adversary_user)
        return {e.params[1] for _, e in self.events_tagged("OWNER")
                if e.params[0] == adv}
