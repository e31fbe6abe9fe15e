"""
The world: identities, channels, the adversary, and the two end-to-end
flows (profile ordering, profile download) that scripts drive.

A world is built once per run from a scenario configuration and then driven
deterministically by a script: the honest script, an attack script, or a
negative control.  All mutation happens on this single-threaded object; the
principals' step functions are pure and the world mediates every message.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

from . import network
from .events import Event, LearnOp, MessageOp, Note, Trace
from .network import (CH_LPA_EUICC, CH_LPA_SERVER, CH_MNO_SERVER, CH_USER_MNO,
                      GateViolation, Middlebox, Tunnel, tls_connect,
                      tunnel_send)
from .pki import CiRoot, EuiccIdentity, new_ci
from .roles import (EuiccDevice, LpaContext, MnoProcess, MSG_ERROR, Order,
                    ProtocolAbort, ServerProcess, TAG_M5, build_msg3,
                    lpa_check_msg12, lpa_check_msg4, lpa_check_msg8, pairs)
from .terms import Atom, FreshSource, Knowledge, NULL, Term, is_null

ADVERSARY_USER = "user-adv"


class Adversary:
    """Dolev-Yao attacker: observed knowledge plus the deduction gate."""

    def __init__(self, world: "World") -> None:
        self.world = world
        self.knowledge = Knowledge()

    def learn(self, *terms: Term) -> None:
        for t in terms:
            if t not in self.knowledge.base:
                self.world.trace.append(LearnOp(t))
                self.knowledge = self.knowledge.learn(t)

    grant = learn

    def knows(self, t: Term) -> bool:
        return self.knowledge.deduce(t)

    def require(self, t: Term, what: str = "term") -> None:
        if not self.knows(t):
            raise GateViolation(f"adversary cannot derive {what}")

    def fresh_nonce(self, label: str = "adv-n") -> Term:
        n = self.world.fresh.nonce(label)
        self.learn(n)
        return n

    def fresh_dh(self, label: str = "adv-d") -> Term:
        d = self.world.fresh.dhpriv(label)
        self.learn(d)
        return d

    def gate_send(self, channel: str, direction: str, term: Term,
                  unsafe: bool = False) -> None:
        if not unsafe:
            self.require(term, f"message for {direction}")
        self.world.trace.append(
            MessageOp(channel, direction, term, by_adversary=True, unsafe=unsafe))


@dataclass
class UserAgent:
    label: str
    atom: Atom
    euicc: str            # eid label of the owned device
    mno: str              # subscribed operator


@dataclass
class Code:
    """Download initialization data: matching id, server name, optional oid."""
    iac: Term
    s: Atom
    oid: Optional[Atom] = None
    for_user: Optional[str] = None


@dataclass
class DownloadResult:
    completed: bool
    stage: str
    reason: Optional[str] = None
    it: Optional[Term] = None
    profile: Optional[Term] = None


class World:
    def __init__(self, cfg) -> None:
        self.cfg = cfg
        self.fresh = FreshSource()
        self.trace = Trace(adversary_user=ADVERSARY_USER)
        self.adversary = Adversary(self)
        self.ci: Optional[CiRoot] = None
        self.servers: dict[str, ServerProcess] = {}
        self.mnos: dict[str, MnoProcess] = {}
        self.users: dict[str, UserAgent] = {}
        self.euiccs: dict[str, EuiccDevice] = {}
        self.compromised_servers: set[str] = set()
        self.compromised_euiccs: set[str] = set()
        self.adversary_mno_proxies: set[str] = set()
        self.order_channel_proxies: set[str] = set()
        self.user_channel_fraud: set[str] = set()
        self.compromised_lpa_users: set[str] = set()

    # -- plumbing ------------------------------------------------------------

    def emit(self, event: Event) -> None:
        self.trace.append(event)

    def note(self, kind: str, who: str, detail: str) -> None:
        self.trace.append(Note(kind, who, detail))

    def public_broadcast(self, term: Term, who: str) -> None:
        self.trace.append(MessageOp(CH_LPA_SERVER, f"{who}->*", term))
        self.adversary.learn(term)

    def server_for_oid(self, oid: Atom) -> ServerProcess:
        for srv in self.servers.values():
            if srv.oid == oid:
                return srv
        raise KeyError(oid.label)

    def long_term_private_keys(self) -> list:
        keys: list[Term] = [self.ci.sk]
        for srv in self.servers.values():
            keys += [srv.identity.sk_tls, srv.identity.sk_sa, srv.identity.sk_sp]
        for dev in self.euiccs.values():
            keys.append(dev.identity.sk_u)
        return keys

    # -- profile ordering ------------------------------------------------------

    def _mno_book_order(self, mno: MnoProcess, user_atom: Atom, eid: Term) -> Order:
        """MNO forwards the order on its private channel; the server prepares."""
        server = self.servers[mno.server_domain]
        request = pairs([Atom("order-request"), user_atom, mno.atom, eid])
        self.trace.append(MessageOp(CH_MNO_SERVER, f"{mno.label}->server", request))
        if (mno.label in self.adversary_mno_proxies
                or mno.server_domain in self.order_channel_proxies):
            self.adversary.learn(request)
        order = server.create_order(user_atom, mno.atom, eid)
        if self.cfg.approach == "ac":
            reply_items = [Atom("order-reply"), order.iac, server.domain]
            if "R1" in self.cfg.recs:
                reply_items.append(server.oid)
            reply = pairs(reply_items)
            self.trace.append(MessageOp(CH_MNO_SERVER, f"server->{mno.label}", reply))
            if (mno.label in self.adversary_mno_proxies
                    or mno.server_domain in self.order_channel_proxies):
                self.adversary.learn(reply)
        return order

    def request_profile(self, user_label: str, mno_label: Optional[str] = None,
                        deliver_hook: Optional[Callable] = None) -> Optional[Code]:
        """Honest ordering flow for `user_label`'s own eUICC.

        Default-server approach: the user's intent is recorded at request
        time and the order names their eUICC.  Activation-code approach: the
        code travels back over the user channel and the intent event binds
        the code the user actually received (a spoofed delivery therefore
        shows up inside the user's intent, which is the point).
        """
        user = self.users[user_label]
        mno = self.mnos[mno_label or user.mno]
        eid_atom = self.euiccs[user.euicc].eid
        request = pairs([Atom("profile-request"), user.atom, eid_atom])
        self.trace.append(MessageOp(CH_USER_MNO, f"{user_label}->{mno.label}", request))
        if self.cfg.approach == "ds":
            self.emit(Event("INTENT", (user.atom, mno.atom, eid_atom, NULL)))
            self._mno_book_order(mno, user.atom, eid_atom)
            return None
        order = self._mno_book_order(mno, user.atom, eid_atom)
        server = self.servers[mno.server_domain]
        oid = server.oid if "R1" in self.cfg.recs else None
        delivery_items = [Atom("code-delivery"), order.iac, server.domain]
        if oid is not None:
            delivery_items.append(oid)
        delivery = pairs(delivery_items)
        self.trace.append(MessageOp(CH_USER_MNO, f"{mno.label}->{user_label}", delivery))
        if "read-code" in self.user_channel_fraud:
            self.adversary.learn(delivery)
        code = Code(order.iac, server.domain, oid, for_user=user_label)
        if user_label == ADVERSARY_USER or user_label in self.compromised_lpa_users:
            # the adversary reads codes it legitimately receives, and a
            # subverted LPA leaks the ones passing through it
            self.adversary.learn(code.iac)
        if deliver_hook is not None:
            if not ("spoof-code" in self.user_channel_fraud
                    or user_label in self.compromised_lpa_users):
                raise GateViolation("user channel integrity is intact")
            code = deliver_hook(code)
            self.adversary.gate_send(
                CH_USER_MNO, f"adv->{user_label}",
                pairs([Atom("code-delivery"), code.iac, code.s]
                      + ([code.oid] if code.oid is not None else [])))
            code.for_user = user_label
        self.emit(Event("INTENT", (user.atom, mno.atom, eid_atom, code.iac)))
        return code

    def fraud_order(self, mode: str, claimed_user: str, mno_label: str,
                    eid_label: Optional[str]) -> Optional[Code]:
        """Ordering fraud on the user channel: no honest intent exists.

        ``impersonate-user``: the adversary passes as `claimed_user`; the
        resulting profile/code lands in the adversary's hands (their device,
        in the default-server approach).  ``order-for-euicc``: the adversary
        orders under its own identity but names someone else's eUICC.
        """
        if mode not in self.user_channel_fraud:
            raise GateViolation(f"user channel does not permit {mode}")
        mno = self.mnos[mno_label]
        claimed = Atom(claimed_user)
        if mode == "impersonate-user":
            target_eid = self.euiccs[eid_label].eid if eid_label else NULL
        else:  # order-for-euicc
            target_eid = self.euiccs[eid_label].eid
        self.emit(Event("FraudOrder", (Atom(mode), claimed, target_eid)))
        if self.cfg.approach == "ds":
            if is_null(target_eid):
                raise ValueError("default-server fraud order needs an eUICC id")
            self._mno_book_order(mno, claimed, target_eid)
            return None
        order = self._mno_book_order(mno, claimed, target_eid)
        server = self.servers[mno.server_domain]
        oid = server.oid if "R1" in self.cfg.recs else None
        # the code goes back to whoever placed the order: the adversary
        self.adversary.learn(order.iac)
        return Code(order.iac, server.domain, oid, for_user=None)

    def proxy_order(self, mno_label: str, user_atom: Atom, eid_label: Optional[str]) -> Optional[Code]:
        """Order injected straight onto a compromised MNO's server channel."""
        if mno_label not in self.adversary_mno_proxies:
            raise GateViolation(f"no proxy access to {mno_label}")
        mno = self.mnos[mno_label]
        server = self.servers[mno.server_domain]
        eid = self.euiccs[eid_label].eid if eid_label else NULL
        request = pairs([Atom("order-request"), user_atom, mno.atom, eid])
        self.adversary.gate_send(CH_MNO_SERVER, f"adv-as-{mno_label}->server", request)
        if self.cfg.approach == "ds":
            if is_null(eid):
                raise ValueError("default-server order needs an eUICC id")
            order = server.create_order(user_atom, mno.atom, eid)
            return None
        order = server.create_order(user_atom, mno.atom, eid)
        reply_items = [Atom("order-reply"), order.iac, server.domain]
        if "R1" in self.cfg.recs:
            reply_items.append(server.oid)
        reply = pairs(reply_items)
        self.trace.append(MessageOp(CH_MNO_SERVER, f"server->{mno_label}", reply))
        self.adversary.learn(reply)
        oid = server.oid if "R1" in self.cfg.recs else None
        return Code(order.iac, server.domain, oid, for_user=None)

    def spoof_code_delivery(self, user_label: str, code: Code) -> Code:
        """Unsolicited or substituted code pushed at a user whose delivery
        channel integrity is compromised.  No intent event: the user never
        asked their operator for this."""
        if "spoof-code" not in self.user_channel_fraud \
                and user_label not in self.compromised_lpa_users:
            raise GateViolation("user channel integrity is intact")
        items = [Atom("code-delivery"), code.iac, code.s]
        if code.oid is not None:
            items.append(code.oid)
        self.adversary.gate_send(CH_USER_MNO, f"adv->{user_label}", pairs(items))
        return Code(code.iac, code.s, code.oid, for_user=user_label)

    def adversary_code(self, iac: Term, s: Atom, oid: Optional[Atom] = None) -> Code:
        """A code the adversary intends to type into a device it controls;
        only constructible if the matching id is actually derivable."""
        self.adversary.require(iac, "activation code")
        return Code(iac, s, oid, for_user=None)

    # -- profile download ------------------------------------------------------

    def start_download(self, user_label: str, code: Optional[Code] = None,
                       middlebox: Optional[Middlebox] = None,
                       dial: Optional[Atom] = None,
                       inject_code: Optional[Code] = None,
                       careless: Optional[bool] = None,
                       euicc_label: Optional[str] = None) -> DownloadResult:
        """Drive one full download attempt for `user_label`'s device."""
        cfg = self.cfg
        user = self.users[user_label]
        device = self.euiccs[euicc_label or user.euicc]
        adversary_client = (user_label == ADVERSARY_USER)
        lpa_compromised = user_label in self.compromised_lpa_users

        if cfg.approach == "ac":
            if code is None:
                raise ValueError("activation-code download needs a code")
            if code.for_user not in (user_label,) and not adversary_client:
                raise GateViolation("code was not delivered to this user")
            if code.for_user is None and adversary_client:
                self.adversary.require(code.iac, "activation code")
            dial_to = dial or code.s
            iac = code.iac
            expected_oid = code.oid if "R1" in cfg.recs else None
        else:
            dial_to = dial or device.identity.default_server
            iac = NULL
            expected_oid = (device.identity.default_server_oid
                            if "R2" in cfg.recs else None)

        if lpa_compromised:
            # a subverted LPA leaks whatever passes through its hands
            if not is_null(iac):
                self.adversary.learn(iac)
            if inject_code is not None:
                self.adversary.require(inject_code.iac, "injected code")
                iac = inject_code.iac
        elif inject_code is not None:
            raise GateViolation("only a compromised LPA can swap the code")

        careless_flag = cfg.careless_user if careless is None else careless
        ctx = LpaContext(
            user=user_label, dial=dial_to,
            expected_mno=None if adversary_client else self.mnos[user.mno].atom,
            expected_oid=expected_oid, iac=iac,
            strict=cfg.lpa_strict,
            careless=careless_flag or adversary_client or lpa_compromised)

        try:
            tun = tls_connect(self, dial_to, middlebox,
                              client_is_adversary=adversary_client or lpa_compromised)
        except GateViolation:
            raise

        # challenge from the secure element
        m2 = device.begin_session()
        self.trace.append(MessageOp(CH_LPA_EUICC, "euicc->lpa:m2", m2))
        n_u, ski = device.challenge()
        ctx.n_u = n_u

        def blocked(stage: str, reason: str) -> DownloadResult:
            self.note("blocked", f"lpa-{user_label}", f"{stage}: {reason}")
            return DownloadResult(False, stage, reason)

        try:
            m4 = tunnel_send(self, tun, "m3", build_msg3(n_u, ski))
            if m4 == MSG_ERROR:
                return DownloadResult(False, "m3", "server abort")
            reason = lpa_check_msg4(ctx, self, m4)
            if reason:
                return blocked("m4", reason)
            ctx5 = pairs([TAG_M5, iac])
            self.trace.append(MessageOp(CH_LPA_EUICC, "lpa->euicc:m5", ctx5))
            device.set_context(iac, expected_oid)
            m7 = device.process_msg4(m4)
            self.trace.append(MessageOp(CH_LPA_EUICC, "euicc->lpa:m7", m7))

            m8 = tunnel_send(self, tun, "m7", m7)
            if m8 == MSG_ERROR:
                return DownloadResult(False, "m7", "server abort")
            reason = lpa_check_msg8(ctx, self, m8)
            if reason:
                return blocked("m8", reason)
            m11 = device.process_msg8(m8)
            self.trace.append(MessageOp(CH_LPA_EUICC, "euicc->lpa:m11", m11))

            m12 = tunnel_send(self, tun, "m11", m11)
            if m12 == MSG_ERROR:
                return DownloadResult(False, "m11", "server abort")
            reason = lpa_check_msg12(ctx, self, m12)
            if reason:
                return blocked("m12", reason)
            m15 = device.process_msg12(m12)
            self.trace.append(MessageOp(CH_LPA_EUICC, "euicc->lpa:m15", m15))

            m16 = tunnel_send(self, tun, "m15", m15)
            self.trace.append(MessageOp(CH_LPA_EUICC, "lpa->euicc:m17",
                                        Atom("notification-delete-ack")))
            session = device.session
            return DownloadResult(m16 != MSG_ERROR, "done",
                                  None if m16 != MSG_ERROR else "notification rejected",
                                  it=session.it, profile=session.installed)
        except ProtocolAbort as exc:
            self.note("abort", exc.who, exc.reason)
            return DownloadResult(False, exc.who, exc.reason)
