"""
Principal state machines: download server, eUICC, user/LPA, MNO.

The wire format is a small tagged-tuple grammar over terms.  Only the
security-relevant content is modeled; transport framing, capability lists
and error codes are out of scope.  Message numbers follow the common
handshake: 2/3 carry the eUICC challenge, 4 the signed server identity,
7 the signed client response (with the activation code, if any), 8/9 the
profile-binding signature, 11 the client key-exchange share, 12/13 the
server share plus the encrypted profile and MAC-protected operator id,
15/16 the signed install notification and its acknowledgement.

Every verification clause is one explicit abort site.  A failed check
raises ProtocolAbort; the transport layer records the abort in the trace
and the session dies without emitting its next progress event.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .events import Event
from .pki import (POLICY_EUICC, POLICY_PROFILE_BINDING, POLICY_SERVER_AUTH,
                  CertError, Certificate, EuiccIdentity, ServerIdentity,
                  parse_certificate, verify_cert)
from .terms import (Atom, DhPub, NULL, Nonce, Pair, PubKey, SealError, Sign,
                    Term, dh_pub, dh_shared, is_null, kdf, pairs, seal,
                    unpairs, unseal)

TAG_M3 = Atom("m3-init")
TAG_M4 = Atom("m4-server-auth")
TAG_SIG4 = Atom("sig4")
TAG_M5 = Atom("m5-code-to-euicc")
TAG_M7 = Atom("m7-client-auth")
TAG_SIG7 = Atom("sig7")
TAG_M8 = Atom("m8-profile-binding")
TAG_SIG8 = Atom("sig8")
TAG_M11 = Atom("m11-client-share")
TAG_SIG11 = Atom("sig11")
TAG_M12 = Atom("m12-profile-delivery")
TAG_SIG12 = Atom("sig12")
TAG_M15 = Atom("m15-notification")
TAG_SIG15 = Atom("sig15")
MSG_OK = Atom("ok")
MSG_ERROR = Atom("error")


class ProtocolAbort(Exception):
    """A receiver-side verification failed; the session must stop here."""

    def __init__(self, who: str, reason: str) -> None:
        super().__init__(f"{who}: {reason}")
        self.who = who
        self.reason = reason


def _tagged(term: Term, tag: Atom, arity: int, who: str) -> list[Term]:
    try:
        parts = unpairs(term, arity)
    except SealError as exc:
        raise ProtocolAbort(who, f"malformed message: {exc}") from exc
    if parts[0] != tag:
        raise ProtocolAbort(who, f"unexpected message tag")
    return parts[1:]


# ---------------------------------------------------------------------------
# Message builders / parsers (shared by roles, attack scripts and tests)
# ---------------------------------------------------------------------------

def build_msg3(n_u: Term, ski: Atom) -> Term:
    return pairs([TAG_M3, n_u, ski])


def parse_msg3(term: Term, who: str = "server") -> tuple[Term, Term]:
    n_u, ski = _tagged(term, TAG_M3, 3, who)
    return n_u, ski


def sig4_body(n_u: Term, n_s: Term, it: Term, s: Atom,
              oid: Optional[Atom]) -> Term:
    items = [TAG_SIG4, n_u, n_s, it, s]
    if oid is not None:
        items.append(oid)
    return pairs(items)


def build_msg4(sig: Term, cert_sa: Term) -> Term:
    return pairs([TAG_M4, sig, cert_sa])


def parse_msg4(term: Term, who: str = "lpa") -> tuple[Term, Term]:
    sig, cert = _tagged(term, TAG_M4, 3, who)
    return sig, cert


def split_sig4(body: Term, with_oid: bool, who: str) -> list[Term]:
    parts = _tagged(body, TAG_SIG4, 6 if with_oid else 5, who)
    return parts


def sig7_body(n_s: Term, it: Term, s: Term, iac: Term,
              oid: Optional[Atom]) -> Term:
    items = [TAG_SIG7, n_s, it, s, iac]
    if oid is not None:
        items.append(oid)
    return pairs(items)


def build_msg7(sig: Term, cert_u: Term) -> Term:
    return pairs([TAG_M7, sig, cert_u])


def parse_msg7(term: Term, who: str = "server") -> tuple[Term, Term]:
    sig, cert = _tagged(term, TAG_M7, 3, who)
    return sig, cert


def split_sig7(body: Term, with_oid: bool, who: str) -> list[Term]:
    return _tagged(body, TAG_SIG7, 6 if with_oid else 5, who)


def sig8_body(it: Term, eid: Optional[Term]) -> Term:
    items = [TAG_SIG8, it]
    if eid is not None:
        items.append(eid)
    return pairs(items)


def build_msg8(sig: Term, cert_sp: Term) -> Term:
    return pairs([TAG_M8, sig, cert_sp])


def parse_msg8(term: Term, who: str = "lpa") -> tuple[Term, Term]:
    sig, cert = _tagged(term, TAG_M8, 3, who)
    return sig, cert


def sig11_body(it: Term, q_u: Term) -> Term:
    return pairs([TAG_SIG11, it, q_u])


def build_msg11(sig: Term) -> Term:
    return pairs([TAG_M11, sig])


def parse_msg11(term: Term, who: str = "server") -> Term:
    (sig,) = _tagged(term, TAG_M11, 2, who)
    return sig


def sig12_body(it: Term, q_s: Term, q_u: Term) -> Term:
    return pairs([TAG_SIG12, it, q_s, q_u])


def build_msg12(sig: Term, enc: Term, mac_enc: Term, mno: Term,
                mac_mno: Term) -> Term:
    return pairs([TAG_M12, sig, enc, mac_enc, mno, mac_mno])


def parse_msg12(term: Term, who: str = "lpa") -> list[Term]:
    return _tagged(term, TAG_M12, 6, who)


def sig15_body(s: Term, oid: Term, it: Term) -> Term:
    return pairs([TAG_SIG15, s, oid, it])


def build_msg15(sig: Term) -> Term:
    return pairs([TAG_M15, sig])


def parse_msg15(term: Term, who: str = "server") -> Term:
    (sig,) = _tagged(term, TAG_M15, 2, who)
    return sig


def signed_body(sig: Term, key: PubKey, who: str, what: str) -> Term:
    try:
        return unseal("sign", key, sig)
    except SealError as exc:
        raise ProtocolAbort(who, f"bad signature on {what}: {exc}") from exc


# ---------------------------------------------------------------------------
# Orders and the download server
# ---------------------------------------------------------------------------

@dataclass
class Order:
    user: Atom
    mno: Atom
    server_domain: Atom
    eid: Term              # target/registered eUICC id, or NULL
    profile: Term
    iac: Term              # activation code nonce, or NULL
    served_count: int = 0


@dataclass
class ServerSession:
    it: Nonce
    n_s: Nonce
    n_u: Term
    phase: str = "await7"                  # await7 -> await11 -> await15 -> done
    order: Optional[Order] = None
    peer_eid: Optional[Term] = None
    peer_key: Optional[PubKey] = None
    q_u: Optional[Term] = None
    d_s: Optional[Term] = None
    k: Optional[Term] = None
    k_mac: Optional[Term] = None


class ServerProcess:
    """One download server: an order store plus per-transaction sessions.

    A session is created for each incoming handshake request.  Its start
    event announces the order the server currently expects to serve (the
    oldest unserved one); the order actually served is selected when the
    authenticated client response arrives, by activation code or by the
    certified eUICC id.
    """

    def __init__(self, world, identity: ServerIdentity) -> None:
        self.world = world
        self.identity = identity
        self.orders: list[Order] = []
        self.sessions: dict = {}
        self.leak_ephemeral = False  # mutant hook for the forward-secrecy test

    # convenience
    @property
    def domain(self) -> Atom:
        return self.identity.domain

    @property
    def subject(self) -> Atom:
        return self.identity.subject

    @property
    def oid(self) -> Atom:
        return self.identity.oid

    def _recs(self) -> frozenset:
        return self.world.cfg.recs

    def create_order(self, user: Atom, mno: Atom, eid: Term) -> Order:
        """Prepare a profile; activation-code approach also mints the code."""
        world = self.world
        secret = world.fresh.nonce("profile-secret")
        profile = Pair(Atom(f"profile-{mno.label}"), secret)
        if world.cfg.approach == "ac":
            iac = world.fresh.nonce("iac")
            registered = eid if "R3" in self._recs() else NULL
            order = Order(user, mno, self.domain, registered, profile, iac)
        else:
            if is_null(eid):
                raise ValueError("default-server orders must name an eUICC")
            order = Order(user, mno, self.domain, eid, profile, NULL)
        self.orders.append(order)
        world.emit(Event("ORDER", (user, mno, self.domain, order.eid,
                                   profile, order.iac)))
        return order

    # -- request dispatch ----------------------------------------------------

    def handle(self, term: Term) -> Term:
        if isinstance(term, Pair) and term.left == TAG_M3:
            return self._handle_init(term)
        if isinstance(term, Pair) and term.left == TAG_M7:
            return self._handle_auth_client(term)
        if isinstance(term, Pair) and term.left == TAG_M11:
            return self._handle_key_exchange(term)
        if isinstance(term, Pair) and term.left == TAG_M15:
            return self._handle_notification(term)
        raise ProtocolAbort("server", "unknown request")

    def _announced_order(self) -> Optional[Order]:
        for o in self.orders:
            if o.served_count == 0:
                return o
        return self.orders[0] if self.orders else None

    def _handle_init(self, term: Term) -> Term:
        world = self.world
        n_u, ski = parse_msg3(term)
        if ski != world.ci.ski:
            raise ProtocolAbort("server", "unsupported root key identifier")
        n_s = world.fresh.nonce("n-s")
        it = world.fresh.nonce("i-t")
        session = ServerSession(it=it, n_s=n_s, n_u=n_u)
        self.sessions[it] = session
        announced = self._announced_order()
        world.emit(Event("S0", (self.subject, it, self.domain,
                                announced.mno if announced else NULL,
                                announced.iac if announced else NULL)))
        oid = self.oid if "R7" in self._recs() else None
        sig = seal("sign", self.identity.sk_sa,
                   sig4_body(n_u, n_s, it, self.domain, oid))
        return build_msg4(sig, self.identity.cert_sa)

    def _session_for(self, it: Term, phase: str) -> ServerSession:
        session = self.sessions.get(it)
        if session is None:
            raise ProtocolAbort("server", "unknown transaction id")
        if session.phase != phase:
            raise ProtocolAbort("server", f"message out of phase ({session.phase})")
        return session

    def _select_order(self, cert: Certificate, iac: Term) -> Order:
        if self.world.cfg.approach == "ac":
            if is_null(iac):
                raise ProtocolAbort("server", "missing activation code")
            matches = [o for o in self.orders if o.iac == iac]
            if not matches:
                raise ProtocolAbort("server", "unknown activation code")
            order = matches[0]
            if "R3" in self._recs():
                if is_null(order.eid) or order.eid != cert.subject:
                    raise ProtocolAbort("server", "eUICC not registered for this code")
            return order
        # default-server approach: select by the certified eUICC identifier
        if not is_null(iac):
            raise ProtocolAbort("server", "unexpected activation code")
        matches = [o for o in self.orders if o.eid == cert.subject]
        if not matches:
            raise ProtocolAbort("server", "no profile for this eUICC")
        unserved = [o for o in matches if o.served_count == 0]
        return unserved[0] if unserved else matches[0]

    def _handle_auth_client(self, term: Term) -> Term:
        world = self.world
        recs = self._recs()
        sig, cert_term = parse_msg7(term)
        try:
            cert = verify_cert(cert_term, world.ci, POLICY_EUICC)
        except CertError as exc:
            raise ProtocolAbort("server", str(exc)) from exc
        body = signed_body(sig, cert.subject_key, "server", "client auth")
        parts = split_sig7(body, "R7" in recs, "server")
        n_s, it, s_embedded, iac = parts[0], parts[1], parts[2], parts[3]
        session = self._session_for(it, "await7")
        if n_s != session.n_s:
            raise ProtocolAbort("server", "challenge mismatch")
        if "R8" in recs and s_embedded != self.domain:
            raise ProtocolAbort("server", "client dialed a different server name")
        if "R7" in recs and parts[4] != self.oid:
            raise ProtocolAbort("server", "client authenticated a different server oid")
        order = self._select_order(cert, iac)
        order.served_count += 1
        session.order = order
        session.peer_eid = cert.subject
        session.peer_key = cert.subject_key
        session.phase = "await11"
        world.emit(Event("S1", (cert.subject, self.subject, self.subject,
                                session.it, order.mno, order.iac)))
        eid = cert.subject if "R9" in recs else None
        sig8 = seal("sign", self.identity.sk_sp, sig8_body(session.it, eid))
        return build_msg8(sig8, self.identity.cert_sp)

    def _handle_key_exchange(self, term: Term) -> Term:
        world = self.world
        sig = parse_msg11(term)
        if not isinstance(sig, Sign):
            raise ProtocolAbort("server", "malformed key-exchange message")
        # locate the session first, then insist the signer is the session peer
        body_peek = sig.body
        try:
            _, it, _ = unpairs(body_peek, 3)
        except SealError as exc:
            raise ProtocolAbort("server", "malformed key-exchange body") from exc
        session = self._session_for(it, "await11")
        body = signed_body(sig, session.peer_key, "server", "key exchange")
        it2, q_u = _tagged(body, TAG_SIG11, 3, "server")
        if it2 != session.it:
            raise ProtocolAbort("server", "transaction id mismatch")
        if not isinstance(q_u, DhPub):
            raise ProtocolAbort("server", "client share is not a DH point")
        world.emit(Event("RECV_QU", (q_u,)))
        d_s = world.fresh.dhpriv("d-s")
        q_s = dh_pub(d_s)
        world.emit(Event("SENT_QS", (q_s,)))
        shared = dh_shared(d_s, q_u)
        k = kdf(shared, self.oid, session.peer_eid, "enc")
        k_mac = kdf(shared, self.oid, session.peer_eid, "mac")
        session.q_u, session.d_s, session.k, session.k_mac = q_u, d_s, k, k_mac
        order = session.order
        session.phase = "await15"
        world.emit(Event("S2", (session.peer_eid, self.subject, self.subject,
                                session.it, k, order.profile, order.mno,
                                order.iac)))
        sig12 = seal("sign", self.identity.sk_sp,
                     sig12_body(session.it, q_s, q_u))
        enc = seal("senc", k, order.profile)
        msg = build_msg12(sig12, enc, seal("mac", k_mac, enc),
                          order.mno, seal("mac", k_mac, order.mno))
        if self.leak_ephemeral:
            # mutant used by the forward-secrecy negative control: blurt the
            # ephemeral private share where the network can see it
            world.public_broadcast(
                seal("sign", self.identity.sk_sp,
                     Pair(Atom("session-debug"), d_s)), "server-mutant")
        return msg

    def _handle_notification(self, term: Term) -> Term:
        world = self.world
        sig = parse_msg15(term)
        if not isinstance(sig, Sign):
            raise ProtocolAbort("server", "malformed notification")
        try:
            _, _, _, it = unpairs(sig.body, 4)
        except SealError as exc:
            raise ProtocolAbort("server", "malformed notification body") from exc
        session = self._session_for(it, "await15")
        body = signed_body(sig, session.peer_key, "server", "notification")
        s_emb, oid_emb, it2 = _tagged(body, TAG_SIG15, 4, "server")
        if it2 != session.it:
            raise ProtocolAbort("server", "transaction id mismatch")
        if oid_emb != self.oid:
            raise ProtocolAbort("server", "notification names a different server oid")
        order = session.order
        session.phase = "done"
        world.emit(Event("S3", (session.peer_eid, self.subject, self.subject,
                                session.it, order.profile, s_emb, order.mno)))
        return MSG_OK


# ---------------------------------------------------------------------------
# eUICC
# ---------------------------------------------------------------------------

@dataclass
class EuiccSession:
    n_u: Nonce
    iac: Term = NULL
    expected_oid: Optional[Atom] = None
    phase: str = "await4"           # await4 -> await8 -> await12 -> done
    n_s: Optional[Term] = None
    it: Optional[Term] = None
    s: Optional[Term] = None
    sa_cert: Optional[Certificate] = None
    sp_cert: Optional[Certificate] = None
    d_u: Optional[Term] = None
    q_u: Optional[Term] = None
    keys: Optional[tuple] = None
    installed: Optional[Term] = None


class EuiccDevice:
    """Secure element: runs one download session at a time."""

    def __init__(self, world, identity: EuiccIdentity, owner: str) -> None:
        self.world = world
        self.identity = identity
        self.owner = owner
        self.session: Optional[EuiccSession] = None

    @property
    def eid(self) -> Atom:
        return self.identity.eid

    def _recs(self) -> frozenset:
        return self.world.cfg.recs

    def begin_session(self) -> Term:
        world = self.world
        n_u = world.fresh.nonce("n-u")
        self.session = EuiccSession(n_u=n_u)
        default_s = self.identity.default_server if world.cfg.approach == "ds" else None
        world.emit(Event("U0", (self.eid, default_s or NULL)))
        return pairs([Atom("m2-challenge"), n_u, world.ci.ski])

    def challenge(self) -> tuple:
        session = self.session
        return session.n_u, self.world.ci.ski

    def set_context(self, iac: Term, expected_oid: Optional[Atom]) -> None:
        self.session.iac = iac
        self.session.expected_oid = expected_oid

    def _session_in(self, phase: str) -> EuiccSession:
        if self.session is None or self.session.phase != phase:
            raise ProtocolAbort("euicc", f"message out of phase")
        return self.session

    def process_msg4(self, term: Term) -> Term:
        world = self.world
        recs = self._recs()
        session = self._session_in("await4")
        sig, cert_term = parse_msg4(term, "euicc")
        try:
            cert = verify_cert(cert_term, world.ci, POLICY_SERVER_AUTH)
        except CertError as exc:
            raise ProtocolAbort("euicc", str(exc)) from exc
        body = signed_body(sig, cert.subject_key, "euicc", "server auth")
        parts = split_sig4(body, "R7" in recs, "euicc")
        n_u, n_s, it, s = parts[0], parts[1], parts[2], parts[3]
        if n_u != session.n_u:
            raise ProtocolAbort("euicc", "challenge mismatch")
        if "R7" in recs:
            oid_emb = parts[4]
            if oid_emb != cert.oid:
                raise ProtocolAbort("euicc", "signed oid differs from certificate oid")
            if session.expected_oid is not None and oid_emb != session.expected_oid:
                raise ProtocolAbort("euicc", "server oid differs from expected oid")
        session.n_s, session.it, session.s, session.sa_cert = n_s, it, s, cert
        session.phase = "await8"
        world.emit(Event("U1", (self.eid, cert.subject, it, s)))
        oid = cert.oid if "R7" in recs else None
        sig7 = seal("sign", self.identity.sk_u,
                    sig7_body(n_s, it, s, session.iac, oid))
        return build_msg7(sig7, self.identity.cert_u)

    def process_msg8(self, term: Term) -> Term:
        world = self.world
        recs = self._recs()
        session = self._session_in("await8")
        sig, cert_term = parse_msg8(term, "euicc")
        try:
            cert = verify_cert(cert_term, world.ci, POLICY_PROFILE_BINDING)
        except CertError as exc:
            raise ProtocolAbort("euicc", str(exc)) from exc
        body = signed_body(sig, cert.subject_key, "euicc", "profile binding")
        parts = _tagged(body, TAG_SIG8, 3 if "R9" in recs else 2, "euicc")
        it = parts[0]
        if it != session.it:
            raise ProtocolAbort("euicc", "transaction id mismatch")
        if cert.oid != session.sa_cert.oid:
            raise ProtocolAbort("euicc", "profile-binding oid differs from server oid")
        if "R9" in recs and parts[1] != self.eid:
            raise ProtocolAbort("euicc", "profile binding names a different eUICC")
        session.sp_cert = cert
        session.phase = "await12"
        world.emit(Event("U2", (self.eid, session.sa_cert.subject,
                                cert.subject, session.it)))
        d_u = world.fresh.dhpriv("d-u")
        session.d_u, session.q_u = d_u, dh_pub(d_u)
        sig11 = seal("sign", self.identity.sk_u,
                     sig11_body(session.it, session.q_u))
        return build_msg11(sig11)

    def process_msg12(self, term: Term) -> Term:
        world = self.world
        session = self._session_in("await12")
        sig, enc, mac_enc, mno, mac_mno = parse_msg12(term, "euicc")
        body = signed_body(sig, session.sp_cert.subject_key, "euicc",
                           "key exchange")
        it, q_s, q_u = _tagged(body, TAG_SIG12, 4, "euicc")
        if it != session.it:
            raise ProtocolAbort("euicc", "transaction id mismatch")
        if q_u != session.q_u:
            raise ProtocolAbort("euicc", "own key share missing from signature")
        if not isinstance(q_s, DhPub):
            raise ProtocolAbort("euicc", "server share is not a DH point")
        oid = session.sa_cert.oid
        shared = dh_shared(session.d_u, q_s)
        k = kdf(shared, oid, self.eid, "enc")
        k_mac = kdf(shared, oid, self.eid, "mac")
        try:
            if unseal("mac", k_mac, mac_enc) != enc:
                raise SealError("mac body mismatch")
            if unseal("mac", k_mac, mac_mno) != mno:
                raise SealError("mac body mismatch")
            profile = unseal("senc", k, enc)
        except SealError as exc:
            raise ProtocolAbort("euicc", f"download integrity failure: {exc}") from exc
        session.keys = (k, k_mac)
        session.installed = profile
        session.phase = "done"
        world.emit(Event("U3", (self.eid, session.sa_cert.subject,
                                session.sp_cert.subject, session.it, k,
                                profile, mno, session.iac)))
        sig15 = seal("sign", self.identity.sk_u,
                     sig15_body(session.s, oid, session.it))
        return build_msg15(sig15)


# ---------------------------------------------------------------------------
# User / LPA (one process: the device software acting on the user's behalf)
# ---------------------------------------------------------------------------

@dataclass
class LpaContext:
    user: str
    dial: Atom
    expected_mno: Optional[Atom]
    expected_oid: Optional[Atom] = None
    iac: Term = NULL
    strict: bool = True
    careless: bool = False
    n_u: Optional[Term] = None
    sa_cert_term: Optional[Term] = None


def lpa_check_msg4(ctx: LpaContext, world, term: Term) -> Optional[str]:
    """Return a block reason, or None to forward.  Blocking is not an abort:
    it is the LPA doing its job."""
    try:
        sig, cert_term = parse_msg4(term, "lpa")
        cert = verify_cert(cert_term, world.ci, POLICY_SERVER_AUTH)
        body = unseal("sign", cert.subject_key, sig)
        parts = split_sig4(body, "R7" in world.cfg.recs, "lpa")
    except (ProtocolAbort, CertError, SealError) as exc:
        if ctx.strict:
            return f"unverifiable server message: {exc}"
        # relaxed LPA still needs the embedded server name
        try:
            sig, _ = parse_msg4(term, "lpa")
            if not isinstance(sig, Sign):
                return "unreadable server message"
            parts = unpairs(sig.body, 6 if "R7" in world.cfg.recs else 5)[1:]
        except (ProtocolAbort, SealError) as exc2:
            return f"unreadable server message: {exc2}"
        cert = None
    s = parts[3]
    if s != ctx.dial:
        return f"server name {getattr(s, 'label', s)} does not match dialed {ctx.dial.label}"
    if cert is not None and ctx.expected_oid is not None and cert.oid != ctx.expected_oid:
        return "server oid does not match the expected oid"
    if ctx.strict and parts[0] != ctx.n_u:
        return "challenge mismatch"
    ctx.sa_cert_term = cert_term if cert is not None else None
    return None


def lpa_check_msg8(ctx: LpaContext, world, term: Term) -> Optional[str]:
    if not ctx.strict:
        return None
    try:
        sig, cert_term = parse_msg8(term, "lpa")
        cert = verify_cert(cert_term, world.ci, POLICY_PROFILE_BINDING)
        unseal("sign", cert.subject_key, sig)
        if ctx.sa_cert_term is not None:
            sa_cert, _ = parse_certificate(ctx.sa_cert_term)
            if cert.oid != sa_cert.oid:
                return "profile-binding oid mismatch"
    except (ProtocolAbort, CertError, SealError) as exc:
        return f"unverifiable binding message: {exc}"
    return None


def lpa_check_msg12(ctx: LpaContext, world, term: Term) -> Optional[str]:
    """The operator-confirmation step: user compares the displayed MNO id."""
    try:
        _sig, _enc, _mac1, mno, _mac2 = parse_msg12(term, "lpa")
    except ProtocolAbort as exc:
        return str(exc)
    if ctx.careless:
        return None
    if ctx.expected_mno is not None and mno != ctx.expected_mno:
        return (f"operator id {getattr(mno, 'label', mno)} does not match "
                f"the expected {ctx.expected_mno.label}")
    return None


# ---------------------------------------------------------------------------
# MNO
# ---------------------------------------------------------------------------

@dataclass
class MnoProcess:
    label: str
    atom: Atom
    server_domain: str
