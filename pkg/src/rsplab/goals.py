"""
Trace-based checking of the fifteen authentication and secrecy goals.

Authentication goals are correspondences: for every (non-excluded)
occurrence of a trigger event, each required pattern must match a strictly
earlier event, with all shared variables bound consistently across the
conjunction.  A requirement marked injective additionally demands a
globally one-to-one assignment from trigger occurrences to witness events;
this checker realizes that as a backtracking matching over candidate
witness tuples, which on these small traces is exact.

Secrecy goals bind a target parameter at the trigger and fail iff the
end-of-run adversary knowledge derives it (knowledge only grows, so
end-of-run is the strongest point to ask).

Exclusions mirror the partial-compromise methodology: a violation is
ignored when it concerns only the adversary's own assets (its own device
on the client side; its own order served to its own device on the server
side) or when the bound operator is itself marked compromised.  Markers
and ownership all come from the trace, never from hidden state.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Optional

from .events import CLIENT_TRIGGER_TAGS, Event, Trace
from .terms import Knowledge, NULL, Term, encode, is_null


# ---------------------------------------------------------------------------
# Pattern language
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Wild:
    pass


@dataclass(frozen=True)
class OptVar:
    """Optional identity slot: matches null, or binds/compares like Var."""
    name: str


W = Wild()


@dataclass(frozen=True)
class EventPattern:
    tag: str
    params: tuple

    def match(self, event: Event, bindings: dict) -> Optional[dict]:
        if event.tag != self.tag:
            return None
        out = dict(bindings)
        for pat, value in zip(self.params, event.params):
            if isinstance(pat, Wild):
                continue
            if isinstance(pat, Var):
                if pat.name in out:
                    if out[pat.name] != value:
                        return None
                else:
                    out[pat.name] = value
            elif isinstance(pat, OptVar):
                if is_null(value):
                    continue
                if pat.name in out:
                    if out[pat.name] != value:
                        return None
                else:
                    out[pat.name] = value
            else:  # literal term
                if pat != value:
                    return None
        return out


@dataclass(frozen=True)
class Requirement:
    pattern: EventPattern
    injective: bool


@dataclass(frozen=True)
class GoalSpec:
    name: str
    kind: str                     # "auth" | "secrecy"
    side: str                     # "client" | "server"
    summary: str
    trigger: EventPattern
    requires: tuple = ()
    secrecy_index: Optional[int] = None


@dataclass
class GoalVerdict:
    goal: str
    status: str                   # "pass" | "violated"
    witness: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.status == "pass"


# ---------------------------------------------------------------------------
# Catalog
# ---------------------------------------------------------------------------

def goal_catalog(injective_notification: bool = False,
                 strict_identity: bool = False) -> list[GoalSpec]:
    """The fifteen goals.  Optional identity slots ([U], [S]) accept null or
    the bound value, which covers both ordering approaches with one catalog.

    ``strict_identity`` is an informational variant, not one of the fifteen:
    it demands that the client already knew the accepted server's name when
    it started (the session-start slot must equal the bound value, null not
    accepted).  Without pre-established identities this fails even on honest
    runs - which is precisely why the protocol cannot promise it.
    """
    V = Var
    order_u = OptVar("U")
    u0_s = Var("S") if strict_identity else OptVar("S")

    def ep(tag, *params):
        return EventPattern(tag, tuple(params))

    n = injective_notification
    return [
        GoalSpec(
            "A", "auth", "client",
            "server authentication: accepting the server implies both sides started",
            ep("U1", V("U"), V("Sa"), V("It"), V("S")),
            (Requirement(ep("U0", V("U"), u0_s), True),
             Requirement(ep("S0", V("Sa"), V("It"), V("S"), W, W), True))),
        GoalSpec(
            "B", "auth", "server",
            "client authentication: accepting the client implies a matching client step",
            ep("S1", V("U"), V("Sa"), W, V("It"), V("mno"), V("iac")),
            (Requirement(ep("S0", V("Sa"), V("It"), V("S"), V("mno"), V("iac")), True),
             Requirement(ep("U1", V("U"), V("Sa"), V("It"), V("S")), True))),
        GoalSpec(
            "Bp", "auth", "server",
            "order binding: authenticated client traces back to owner intent and a unique order",
            ep("S1", V("U"), V("Sa"), W, V("It"), V("mno"), V("iac")),
            (Requirement(ep("OWNER", V("uid"), V("U")), False),
             Requirement(ep("INTENT", V("uid"), V("mno"), V("U"), V("iac")), False),
             Requirement(ep("ORDER", V("uid"), V("mno"), W, order_u, W, V("iac")), True))),
        GoalSpec(
            "C", "auth", "client",
            "profile binding: the binding certificate belongs to an authorized, live peer session",
            ep("U2", V("U"), V("Sa"), V("Sp"), V("It")),
            (Requirement(ep("AUTHORIZE", V("Sp")), False),
             Requirement(ep("U1", V("U"), V("Sa"), V("It"), W), True),
             Requirement(ep("S1", V("U"), V("Sa"), V("Sp"), V("It"), W, W), True))),
        GoalSpec(
            "D", "auth", "server",
            "key exchange, server side: client really entered the exchange",
            ep("S2", V("U"), V("Sa"), V("Sp"), V("It"), W, V("P"), V("mno"), V("iac")),
            (Requirement(ep("S1", V("U"), V("Sa"), V("Sp"), V("It"), V("mno"), V("iac")), True),
             Requirement(ep("U2", V("U"), V("Sa"), V("Sp"), V("It")), True))),
        GoalSpec(
            "E", "auth", "client",
            "key exchange, client side: accepted key was issued by the matching server step",
            ep("U3", V("U"), V("Sa"), V("Sp"), V("It"), V("k"), W, V("mno"), V("iac")),
            (Requirement(ep("U2", V("U"), V("Sa"), V("Sp"), V("It")), True),
             Requirement(ep("S2", V("U"), V("Sa"), V("Sp"), V("It"), V("k"), W, V("mno"), V("iac")), True))),
        GoalSpec(
            "F", "auth", "client",
            "profile delivery: accepted profile and key both come from the matching server step",
            ep("U3", V("U"), V("Sa"), V("Sp"), V("It"), V("k"), V("P"), V("mno"), V("iac")),
            (Requirement(ep("U2", V("U"), V("Sa"), V("Sp"), V("It")), True),
             Requirement(ep("S2", V("U"), V("Sa"), V("Sp"), V("It"), V("k"), V("P"), V("mno"), V("iac")), True))),
        GoalSpec(
            "G", "auth", "server",
            "install notification: accepted only for a profile this server sent and the client took",
            ep("S3", V("U"), V("Sa"), V("Sp"), V("It"), V("P"), W, V("mno")),
            (Requirement(ep("S2", V("U"), V("Sa"), V("Sp"), V("It"), W, V("P"), V("mno"), W), n),
             Requirement(ep("U3", V("U"), V("Sa"), V("Sp"), V("It"), W, V("P"), V("mno"), W), n),
             Requirement(ep("OWNER", V("uid"), V("U")), False),
             Requirement(ep("INTENT", V("uid"), V("mno"), V("U"), W), False),
             Requirement(ep("ORDER", V("uid"), V("mno"), W, order_u, W, W), False))),
        GoalSpec(
            "I", "auth", "client",
            "whole handshake: an accepted profile implies matching session starts on both sides",
            ep("U3", V("U"), V("Sa"), W, V("It"), V("k"), V("P"), V("mno"), W),
            (Requirement(ep("U0", V("U"), OptVar("S")), True),
             Requirement(ep("S0", V("Sa"), V("It"), W, V("mno"), W), True))),
        GoalSpec(
            "J", "auth", "client",
            "full protocol, client side: accepted profile traces back to intent and a unique order",
            ep("U3", V("U"), V("Sa"), W, V("It"), W, V("P"), V("mno"), V("iac")),
            (Requirement(ep("OWNER", V("uid"), V("U")), False),
             Requirement(ep("INTENT", V("uid"), V("mno"), V("U"), V("iac")), False),
             Requirement(ep("ORDER", V("uid"), V("mno"), W, order_u, V("P"), V("iac")), True))),
        GoalSpec(
            "K", "auth", "server",
            "full protocol, server side: delivered profile traces back to intent and a unique order",
            ep("S2", V("U"), V("Sa"), W, V("It"), W, V("P"), V("mno"), V("iac")),
            (Requirement(ep("OWNER", V("uid"), V("U")), False),
             Requirement(ep("INTENT", V("uid"), V("mno"), V("U"), V("iac")), False),
             Requirement(ep("ORDER", V("uid"), V("mno"), W, order_u, V("P"), V("iac")), True))),
        GoalSpec(
            "W", "secrecy", "server",
            "session key accepted by the server stays unknown to the adversary",
            ep("S2", V("U"), V("Sa"), W, W, V("k"), V("P"), V("mno"), W),
            secrecy_index=4),
        GoalSpec(
            "X", "secrecy", "client",
            "session key accepted by the client stays unknown to the adversary",
            ep("U3", V("U"), V("Sa"), W, W, V("k"), V("P"), V("mno"), W),
            secrecy_index=4),
        GoalSpec(
            "Y", "secrecy", "server",
            "profile sent by the server stays unknown to the adversary",
            ep("S2", V("U"), V("Sa"), W, W, V("k"), V("P"), V("mno"), V("iac")),
            secrecy_index=5),
        GoalSpec(
            "Z", "secrecy", "client",
            "profile accepted by the client stays unknown to the adversary",
            ep("U3", V("U"), V("Sa"), W, W, V("k"), V("P"), V("mno"), V("iac")),
            secrecy_index=5),
    ]


GOAL_NAMES = [g.name for g in goal_catalog()]


# ---------------------------------------------------------------------------
# Exclusions
# ---------------------------------------------------------------------------

class _TraceIndex:
    def __init__(self, trace: Trace) -> None:
        from .terms import Atom
        self.adv_atom = Atom(trace.adversary_user)
        self.adv_eids = trace.adversary_owned_eids()
        self.mno_marks = trace.marked("CompromiseMno")
        self.orders = [e for _, e in trace.events_tagged("ORDER")]

    def order_users(self, *, iac: Optional[Term] = None, p: Optional[Term] = None,
                    u: Optional[Term] = None, mno: Optional[Term] = None) -> list:
        out = []
        for e in self.orders:
            o_user, o_mno, _o_s, o_u, o_p, o_iac = e.params
            if iac is not None and o_iac != iac:
                continue
            if p is not None and o_p != p:
                continue
            if u is not None and o_u != u:
                continue
            if mno is not None and o_mno != mno:
                continue
            out.append(o_user)
        return out


def _excluded(idx: _TraceIndex, event: Event) -> bool:
    """Is this trigger occurrence outside the threat model's interest?"""
    tag, params = event.tag, event.params
    # operator compromised and bound into the run: no security expected
    mno_pos = {"U3": 6, "S1": 4, "S2": 6, "S3": 6}.get(tag)
    if mno_pos is not None and params[mno_pos] in idx.mno_marks:
        return True
    if tag in CLIENT_TRIGGER_TAGS:
        # client-side assurance protects the client; the adversary's own
        # device needs none
        return params[0] in idx.adv_eids
    if tag in ("S1", "S2", "S3"):
        u = params[0]
        if u not in idx.adv_eids:
            return False
        # adversary device AND the adversary's own (honestly placed) order:
        # nothing of anyone else's is at stake
        if tag == "S1":
            iac = params[5]
            users = (idx.order_users(iac=iac) if not is_null(iac)
                     else idx.order_users(u=u, mno=params[4]))
        else:
            users = idx.order_users(p=params[4 if tag == "S3" else 5])
        return bool(users) and all(x == idx.adv_atom for x in users)
    return False


# ---------------------------------------------------------------------------
# Correspondence checking
# ---------------------------------------------------------------------------

def _witness_tuples(events: list, upto: int, requires: tuple, bindings: dict):
    """All consistent ways to satisfy the conjunction with earlier events."""
    if not requires:
        return [((), bindings)]
    req, rest = requires[0], requires[1:]
    out = []
    for i, e in events:
        if i >= upto:
            break
        nb = req.pattern.match(e, bindings)
        if nb is None:
            continue
        for tail, fb in _witness_tuples(events, upto, rest, nb):
            out.append(((i,) + tail, fb))
    return out


def _assign_injectively(trigger_options: list, requires: tuple) -> bool:
    """Pick one witness tuple per trigger so injective slots never share."""
    inj_slots = [i for i, r in enumerate(requires) if r.injective]

    def backtrack(t: int, used: dict) -> bool:
        if t == len(trigger_options):
            return True
        for indices, _b in trigger_options[t]:
            clash = False
            for slot in inj_slots:
                if indices[slot] in used.get(slot, ()):  # witness already spoken for
                    clash = True
                    break
            if clash:
                continue
            nxt = {s: used.get(s, frozenset()) for s in inj_slots}
            for slot in inj_slots:
                nxt[slot] = nxt[slot] | {indices[slot]}
            if backtrack(t + 1, nxt):
                return True
        return False

    return backtrack(0, {})


def check_correspondence(trace: Trace, goal: GoalSpec) -> GoalVerdict:
    if goal.kind != "auth":
        raise ValueError(f"goal {goal.name} is not a correspondence")
    idx = _TraceIndex(trace)
    events = trace.events()
    triggers = []
    for i, e in events:
        b = goal.trigger.match(e, {})
        if b is None or _excluded(idx, e):
            continue
        triggers.append((i, e, b))

    trigger_options = []
    for i, e, b in triggers:
        options = _witness_tuples(events, i, goal.requires, b)
        if not options:
            missing = _first_unmatchable(events, i, goal.requires, b)
            return GoalVerdict(goal.name, "violated",
                               _witness_text(goal, i, e, missing))
        trigger_options.append(options)

    if not _assign_injectively(trigger_options, goal.requires):
        return GoalVerdict(goal.name, "violated",
                           _witness_text(goal, triggers[-1][0], triggers[-1][1],
                                         "injective witness exhausted: one "
                                         "matching event claimed by several triggers"))
    return GoalVerdict(goal.name, "pass")


def _first_unmatchable(events, upto, requires, bindings) -> str:
    # best-effort minimal diagnosis: greedily satisfy the prefix, report the
    # first conjunct with no candidates under some consistent prefix choice
    for k, req in enumerate(requires):
        prefix_ok = _witness_tuples(events, upto, requires[:k], bindings)
        found = False
        for _, fb in prefix_ok:
            if _witness_tuples(events, upto, (req,), fb):
                found = True
                break
        if not found:
            return (f"no earlier {req.pattern.tag} matches "
                    f"{_pattern_text(req.pattern, bindings)}")
    return "no consistent combination of witnesses"


def _pattern_text(pattern: EventPattern, bindings: dict) -> str:
    parts = []
    for p in pattern.params:
        if isinstance(p, Var):
            parts.append(encode(bindings[p.name]) if p.name in bindings else f"?{p.name}")
        elif isinstance(p, OptVar):
            bound = bindings.get(p.name)
            parts.append(f"[{encode(bound) if bound is not None else '?' + p.name}]")
        elif isinstance(p, Wild):
            parts.append("_")
        else:
            parts.append(encode(p))
    return f"{pattern.tag}({', '.join(parts)})"


def _witness_text(goal: GoalSpec, index: int, event: Event, detail: str) -> str:
    return f"trigger #{index} {event.render()}; {detail}"


# ---------------------------------------------------------------------------
# Secrecy
# ---------------------------------------------------------------------------

def check_secrecy(trace: Trace, knowledge: Knowledge, goal: GoalSpec) -> GoalVerdict:
    if goal.kind != "secrecy":
        raise ValueError(f"goal {goal.name} is not a secrecy goal")
    idx = _TraceIndex(trace)
    for i, e in trace.events():
        if goal.trigger.match(e, {}) is None or _excluded(idx, e):
            continue
        target = e.params[goal.secrecy_index]
        if knowledge.deduce(target):
            return GoalVerdict(goal.name, "violated",
                               f"trigger #{i} {e.render()}; adversary derives "
                               f"{encode(target)}")
    return GoalVerdict(goal.name, "pass")


def check_goal(trace: Trace, knowledge: Knowledge, goal: GoalSpec) -> GoalVerdict:
    if goal.kind == "secrecy":
        return check_secrecy(trace, knowledge, goal)
    return check_correspondence(trace, goal)


def check_all(trace: Trace, knowledge: Knowledge,
              catalog: Optional[list] = None) -> dict:
    catalog = catalog or goal_catalog()
    return {g.name: check_goal(trace, knowledge, g) for g in catalog}


def check_forward_secrecy(world, mutant_expected: bool = False) -> GoalVerdict:
    """Leak every long-term private key after the run; the session key and
    profile secrecy goals must still hold."""
    post = world.adversary.knowledge.learn(*world.long_term_private_keys())
    for g in goal_catalog():
        if g.kind != "secrecy":
            continue
        verdict = check_secrecy(world.trace, post, g)
        if not verdict.ok:
            return GoalVerdict("forward-secrecy", "violated",
                               f"{g.name} fails after long-term key leak: "
                               f"{verdict.witness}")
    return GoalVerdict("forward-secrecy", "pass")
