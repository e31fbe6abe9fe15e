"""
Deterministic adversary scripts, one per attack marker, plus negative
controls and a bounded random-adversary smoke test.

Script ids match the superscripts in the expected-verdict fixture:

  1  stolen activation code replayed from the adversary's own device
  2  compromised intended server: impersonation and diverted delivery
  3  redirect to a second, compromised server (tunnel off)
  4  leaked victim eUICC key: full client impersonation
  5  captured code signed over with the adversary's own eUICC key
  6  self-ordered code downloaded under the victim's forged identity
  7  ordering fraud: adversary passes as the victim user
  8  leaked activation code used directly
  9  compromised LPA leaks, then swaps, the activation code
  a  order placed for the victim's eUICC; victim fetches the wrong profile
  b  activation code spoofed on delivery to the victim
  c  server signatures replaced with a second server's (misbinding)
  d  client signature replaced with another eUICC's (reverse misbinding)
  e  activation code replaced inside the signed client response
  f  codes exposed at a compromised server's ordering interface

Every adversary-originated term passes the deduction gate; a script that
needed an underivable term would crash the run, which is the point.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable, Optional

from .events import LearnOp, MessageOp
from .network import (CH_LPA_SERVER, Drop, GateViolation, Middlebox, Reply,
                      adversary_request)
from .pki import parse_certificate
from .roles import (MSG_ERROR, ProtocolAbort, build_msg11, build_msg15,
                    build_msg3, build_msg4, build_msg7, build_msg8,
                    build_msg12, parse_msg12, parse_msg4, parse_msg7,
                    parse_msg8, sig11_body, sig12_body, sig15_body,
                    sig4_body, sig7_body, sig8_body)
from .scenarios import (ADV_EID, BYSTANDER, MNO1, MNO2, SERVER1, SERVER2,
                        VICTIM, VICTIM_EID, ScenarioConfig)
from .terms import (Atom, DhPub, Knowledge, NULL, Pair, Sign, Term, dh_pub,
                    dh_shared, is_null, kdf, seal, unpairs)
from .world import ADVERSARY_USER, Code, World


def _flatten(term: Term) -> list[Term]:
    out = []
    while isinstance(term, Pair):
        out.append(term.left)
        term = term.right
    out.append(term)
    return out


# ---------------------------------------------------------------------------
# Honest execution
# ---------------------------------------------------------------------------

def honest_script(world: World) -> None:
    """Order, download, notify: the baseline every world must support."""
    code = world.request_profile(VICTIM)
    result = world.start_download(VICTIM, code=code)
    world.note("info", "harness", f"honest download completed={result.completed}")


# ---------------------------------------------------------------------------
# Middleboxes
# ---------------------------------------------------------------------------

class ImpersonateServer(Middlebox):
    """Answer the victim's whole download with a leaked server identity,
    presenting whatever domain name the victim dialed."""

    terminates = True

    def __init__(self, identity, claim_domain, mno_claim) -> None:
        self.identity = identity
        self.claim = claim_domain
        self.mno = mno_claim
        self.n_s = None
        self.it = None
        self.eid = None

    def serve(self, world, stage, term):
        adv = world.adversary
        recs = world.cfg.recs
        ident = self.identity
        if stage == "m3":
            flat = _flatten(term)
            n_u = flat[1]
            self.n_s = adv.fresh_nonce("fake-ns")
            self.it = adv.fresh_nonce("fake-it")
            oid = ident.oid if "R7" in recs else None
            sig = seal("sign", ident.sk_sa,
                       sig4_body(n_u, self.n_s, self.it, self.claim, oid))
            return build_msg4(sig, ident.cert_sa)
        if stage == "m7":
            _sig, cert_term = parse_msg7(term, "adv")
            cert, _ = parse_certificate(cert_term)
            self.eid = cert.subject
            eid = self.eid if "R9" in recs else None
            return build_msg8(seal("sign", ident.sk_sp,
                                   sig8_body(self.it, eid)), ident.cert_sp)
        if stage == "m11":
            sig = _flatten(term)[1]
            q_u = _flatten(sig.body)[2]
            d = adv.fresh_dh("fake-ds")
            q_s = dh_pub(d)
            z = dh_shared(d, q_u)
            k = kdf(z, ident.oid, self.eid, "enc")
            k_mac = kdf(z, ident.oid, self.eid, "mac")
            fake_profile = Pair(Atom("profile-fake"), adv.fresh_nonce("fake-ki"))
            enc = seal("senc", k, fake_profile)
            return build_msg12(seal("sign", ident.sk_sp,
                                    sig12_body(self.it, q_s, q_u)),
                               enc, seal("mac", k_mac, enc),
                               self.mno, seal("mac", k_mac, self.mno))
        if stage == "m15":
            return Atom("ok")
        raise GateViolation(f"unexpected stage {stage}")


class DivergeDelivery(Middlebox):
    """Relay the victim's session to the real server, then swap the final
    delivery for one of the adversary's own making (needs the profile-
    binding key).  Server and client end the run believing different
    profiles were installed."""

    def __init__(self, identity) -> None:
        self.identity = identity
        self.q_u = None
        self.it = None

    def on_request(self, world, stage, term):
        if stage == "m11":
            sig = _flatten(term)[1]
            _tag, self.it, self.q_u = _flatten(sig.body)
        return term

    def on_response(self, world, stage, term):
        if stage != "m12" or term == MSG_ERROR:
            return term
        adv = world.adversary
        ident = self.identity
        _sig, _enc, _mac1, mno, _mac2 = parse_msg12(term, "adv")
        d = adv.fresh_dh("diverge-ds")
        q_s = dh_pub(d)
        z = dh_shared(d, self.q_u)
        eid = self._eid  # the enrolling eUICC, set by the script
        k = kdf(z, ident.oid, eid, "enc")
        k_mac = kdf(z, ident.oid, eid, "mac")
        fake_profile = Pair(Atom("profile-fake"), adv.fresh_nonce("fake-ki"))
        enc = seal("senc", k, fake_profile)
        return build_msg12(seal("sign", ident.sk_sp,
                                sig12_body(self.it, q_s, self.q_u)),
                           enc, seal("mac", k_mac, enc),
                           mno, seal("mac", k_mac, mno))

    _eid = None

    def note_eid(self, eid) -> None:
        self._eid = eid


class CrossServerResign(Middlebox):
    """Re-sign the server's handshake messages with a different authorized
    server's leaked keys: the client authenticates one server identity, the
    other one believes it owns the session."""

    def __init__(self, other_identity) -> None:
        self.other = other_identity

    def on_response(self, world, stage, term):
        if term == MSG_ERROR:
            return term
        if stage == "m4":
            sig, _cert = parse_msg4(term, "adv")
            return build_msg4(seal("sign", self.other.sk_sa, sig.body),
                              self.other.cert_sa)
        if stage == "m8":
            sig, _cert = parse_msg8(term, "adv")
            return build_msg8(seal("sign", self.other.sk_sp, sig.body),
                              self.other.cert_sp)
        if stage == "m12":
            sig, enc, mac1, mno, mac2 = parse_msg12(term, "adv")
            return build_msg12(seal("sign", self.other.sk_sp, sig.body),
                               enc, mac1, mno, mac2)
        return term


class SwapClientIdentity(Middlebox):
    """Replace the signature and certificate on the client's signed
    messages with a compromised eUICC's; optionally substitute the key
    share so the adversary itself knows the resulting session key."""

    def __init__(self, sk_u, cert_u, own_share: bool = False) -> None:
        self.sk_u = sk_u
        self.cert_u = cert_u
        self.own_share = own_share

    def on_request(self, world, stage, term):
        if stage == "m7":
            sig = _flatten(term)[1]
            return build_msg7(seal("sign", self.sk_u, sig.body), self.cert_u)
        if stage == "m11":
            sig = _flatten(term)[1]
            if self.own_share:
                tag, it, _q_u = _flatten(sig.body)
                q_e = dh_pub(world.adversary.fresh_dh("swap-d"))
                return build_msg11(seal("sign", self.sk_u, sig11_body(it, q_e)))
            return build_msg11(seal("sign", self.sk_u, sig.body))
        return term


class SwapCode(Middlebox):
    """Rewrite the activation code inside the signed client response; needs
    the client's own signing key, so only a leaked-eUICC scenario can run it."""

    def __init__(self, sk_u, cert_u, new_iac) -> None:
        self.sk_u = sk_u
        self.cert_u = cert_u
        self.new_iac = new_iac

    def on_request(self, world, stage, term):
        if stage != "m7":
            return term
        sig = _flatten(term)[1]
        parts = _flatten(sig.body)
        # sig7 layout: tag, n_s, it, s, iac [, oid]
        parts[4] = self.new_iac
        from .terms import pairs
        return build_msg7(seal("sign", self.sk_u, pairs(parts)), self.cert_u)


class CaptureAndDrop(Middlebox):
    """Let the handshake run to the interesting request, then kill it."""

    def __init__(self, after_stage: str) -> None:
        self.after = after_stage

    def on_request(self, world, stage, term):
        if stage == self.after:
            return Drop()
        return term


# ---------------------------------------------------------------------------
# Adversary-driven client (forged identity, no secure element involved)
# ---------------------------------------------------------------------------

def fake_client_download(world: World, domain: str, cert_u, sk_u,
                         iac: Term = NULL, notify: bool = True,
                         qu_override: Optional[Term] = None) -> Optional[dict]:
    """Run the client side of a download with raw key material.  Returns
    session facts, or None as soon as the server refuses."""
    adv = world.adversary
    dial = world.servers[domain].identity.domain
    recs = world.cfg.recs
    n_u = adv.fresh_nonce("forged-nu")
    m4 = adversary_request(world, dial, build_msg3(n_u, world.ci.ski))
    if m4 == MSG_ERROR:
        return None
    sig, cert_sa_term = parse_msg4(m4, "adv")
    cert_sa, _ = parse_certificate(cert_sa_term)
    flat = _flatten(sig.body)  # tag, n_u, n_s, it, s [, oid]
    n_s, it, s = flat[2], flat[3], flat[4]
    oid = cert_sa.oid if "R7" in recs else None
    m8 = adversary_request(world, dial, build_msg7(
        seal("sign", sk_u, sig7_body(n_s, it, s, iac, oid)), cert_u))
    if m8 == MSG_ERROR:
        return None
    d = adv.fresh_dh("forged-d")
    q_u = qu_override if qu_override is not None else dh_pub(d)
    m12 = adversary_request(world, dial, build_msg11(
        seal("sign", sk_u, sig11_body(it, q_u))))
    if m12 == MSG_ERROR:
        return None
    _sig12, enc, _m1, mno, _m2 = parse_msg12(m12, "adv")
    if notify:
        adversary_request(world, dial, build_msg15(
            seal("sign", sk_u, sig15_body(s, cert_sa.oid, it))))
    return {"it": it, "enc": enc, "mno": mno, "s": s}


# ---------------------------------------------------------------------------
# Attack scripts
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AttackScript:
    id: str
    title: str
    applicable: Callable
    run: Callable
    claims: frozenset


def _script_1(world: World) -> None:
    code = world.request_profile(VICTIM)
    world.start_download(VICTIM, code=code)  # code crosses the open channel
    stolen = world.adversary_code(code.iac, code.s, code.oid)
    world.start_download(ADVERSARY_USER, code=stolen)


def _script_2(world: World) -> None:
    code = world.request_profile(VICTIM)
    s1 = world.servers[SERVER1].identity
    impostor = ImpersonateServer(s1, s1.domain, world.mnos[MNO1].atom)
    world.start_download(VICTIM, code=code, middlebox=impostor)
    diverge = DivergeDelivery(s1)
    diverge.note_eid(world.euiccs[VICTIM_EID].eid)
    world.start_download(VICTIM, code=code, middlebox=diverge)


def _script_3(world: World) -> None:
    code = world.request_profile(VICTIM)
    s2 = world.servers[SERVER2].identity
    impostor = ImpersonateServer(s2, world.servers[SERVER1].identity.domain,
                                 world.mnos[MNO1].atom)
    world.start_download(VICTIM, code=code, middlebox=impostor)


def _script_4(world: World) -> None:
    victim = world.euiccs[VICTIM_EID].identity
    if world.cfg.approach == "ds":
        world.request_profile(VICTIM)
        fake_client_download(world, SERVER1, victim.cert_u, victim.sk_u)
        return
    if world.cfg.tls:
        # inside the tunnel the victim's code is out of reach; a code from
        # the adversary's own subscription serves instead
        code = world.request_profile(ADVERSARY_USER)
        fake_client_download(world, SERVER1, victim.cert_u, victim.sk_u,
                             iac=code.iac)
        return
    # without the tunnel, capture the victim's own code mid-handshake; that
    # code stays valid even when orders pre-register the eUICC id
    code = world.request_profile(VICTIM)
    world.start_download(VICTIM, code=code,
                         middlebox=CaptureAndDrop(after_stage="m7"))
    world.adversary.require(code.iac, "captured code")
    fake_client_download(world, SERVER1, victim.cert_u, victim.sk_u,
                         iac=code.iac)


def _script_5(world: World) -> None:
    code = world.request_profile(VICTIM)
    own = world.euiccs[ADV_EID].identity
    world.start_download(VICTIM, code=code,
                         middlebox=SwapClientIdentity(own.sk_u, own.cert_u,
                                                      own_share=True))


def _script_6(world: World) -> None:
    code = world.request_profile(ADVERSARY_USER)
    victim = world.euiccs[VICTIM_EID].identity
    fake_client_download(world, SERVER1, victim.cert_u, victim.sk_u,
                         iac=code.iac)


def _script_7(world: World) -> None:
    if world.cfg.approach == "ds":
        world.fraud_order("impersonate-user", VICTIM, MNO1, ADV_EID)
        world.start_download(ADVERSARY_USER)
        return
    code = world.fraud_order("impersonate-user", VICTIM, MNO1, ADV_EID)
    world.start_download(ADVERSARY_USER, code=code)


def _script_8(world: World) -> None:
    code = world.request_profile(VICTIM)  # delivery is being shoulder-surfed
    stolen = world.adversary_code(code.iac, code.s, code.oid)
    world.start_download(ADVERSARY_USER, code=stolen)


def _script_9(world: World) -> None:
    code = world.request_profile(VICTIM)
    world.start_download(VICTIM, code=code)      # subverted LPA leaks the code
    stolen = world.adversary_code(code.iac, code.s, code.oid)
    world.start_download(ADVERSARY_USER, code=stolen)
    own = world.request_profile(ADVERSARY_USER)  # and can swap in its own
    world.start_download(VICTIM, code=code,
                         inject_code=Code(own.iac, own.s, own.oid))


def _script_a(world: World) -> None:
    world.fraud_order("order-for-euicc", ADVERSARY_USER, MNO1, VICTIM_EID)
    world.start_download(VICTIM)  # user fetches what looks like their profile


def _script_b(world: World) -> None:
    own = world.request_profile(ADVERSARY_USER)
    # the victim never ordered anything: the code just arrives, looking real
    code = world.spoof_code_delivery(VICTIM, Code(own.iac, own.s, own.oid))
    world.start_download(VICTIM, code=code)


def _script_c(world: World) -> None:
    code = world.request_profile(VICTIM)
    world.start_download(VICTIM, code=code,
                         middlebox=CrossServerResign(world.servers[SERVER2].identity))


def _script_d(world: World) -> None:
    if world.cfg.scenario == 6:
        # adversary's own key: rewrite the victim's identity to its own
        own = world.euiccs[ADV_EID].identity
        world.request_profile(ADVERSARY_USER)  # gives the server a matching order
        code = world.request_profile(VICTIM)
        world.start_download(VICTIM, code=code,
                             middlebox=SwapClientIdentity(own.sk_u, own.cert_u))
        return
    # victim's key leaked: rewrite an honest bystander's identity to the victim's
    victim = world.euiccs[VICTIM_EID].identity
    world.request_profile(VICTIM)
    code = world.request_profile(BYSTANDER)
    world.start_download(BYSTANDER, code=code,
                         middlebox=SwapClientIdentity(victim.sk_u, victim.cert_u))


def _script_e(world: World) -> None:
    code = world.request_profile(VICTIM)
    own = world.request_profile(ADVERSARY_USER)
    victim = world.euiccs[VICTIM_EID].identity
    world.start_download(VICTIM, code=code,
                         middlebox=SwapCode(victim.sk_u, victim.cert_u, own.iac))


def _script_f(world: World) -> None:
    code = world.request_profile(VICTIM)  # ordering interface is proxied
    stolen = world.adversary_code(code.iac, code.s, code.oid)
    world.start_download(ADVERSARY_USER, code=stolen)


def _both(scenarios, tls=None):
    def applies(cfg: ScenarioConfig) -> bool:
        if cfg.scenario not in scenarios:
            return False
        if tls is None:
            return True
        return cfg.tls == tls
    return applies


def _ac_only(scenarios, tls=None):
    inner = _both(scenarios, tls)
    return lambda cfg: cfg.approach == "ac" and inner(cfg)


def _ds_only(scenarios, tls=None):
    inner = _both(scenarios, tls)
    return lambda cfg: cfg.approach == "ds" and inner(cfg)


def attack_registry() -> list[AttackScript]:
    ac_all = (1, 2, 3, 4, 5, 6, 7, 8, 10, 11)
    return [
        AttackScript("1", "stolen activation code replay",
                     _ac_only(ac_all, tls=False), _script_1,
                     frozenset({"Bp", "G", "K"})),
        AttackScript("2", "compromised server impersonation and diverted delivery",
                     _both({2}), _script_2,
                     frozenset({"A", "C", "E", "F", "G", "I", "J", "X", "Z"})),
        AttackScript("3", "redirection to a compromised second server",
                     _both({5}, tls=False), _script_3,
                     frozenset({"A", "C", "E", "F", "I", "J", "X", "Z"})),
        AttackScript("4", "client impersonation with the victim's eUICC key",
                     _both({3}), _script_4,
                     frozenset({"B", "D", "G", "W", "Y"})),
        AttackScript("5", "captured code under a forged client identity",
                     _ac_only({6}, tls=False), _script_5,
                     frozenset({"B", "D", "W", "Y"})),
        AttackScript("6", "self-ordered code under the victim's identity",
                     _ac_only({3}), _script_6,
                     frozenset({"Bp", "G", "K"})),
        AttackScript("7", "profile ordered in the victim's name",
                     _both({8}), _script_7,
                     frozenset({"Bp", "G", "K"})),
        AttackScript("8", "leaked activation code used directly",
                     _ac_only({10}), _script_8,
                     frozenset({"Bp", "G", "K"})),
        AttackScript("9", "compromised LPA leaks and swaps the code",
                     _ac_only({4}), _script_9,
                     frozenset({"Bp", "G", "J", "K"})),
        AttackScript("a", "second profile ordered for the victim's eUICC",
                     _ds_only({9}), _script_a,
                     frozenset({"Bp", "G", "J", "K"})),
        AttackScript("b", "activation code spoofed on delivery",
                     _ac_only({11}), _script_b,
                     frozenset({"Bp", "G", "J", "K"})),
        AttackScript("c", "server-side misbinding by signature replacement",
                     lambda cfg: cfg.scenario == 2 or (cfg.scenario == 5 and not cfg.tls),
                     _script_c,
                     frozenset({"A", "B", "C", "D"})),
        AttackScript("d", "client-side misbinding by signature replacement",
                     _both({3, 6}, tls=False), _script_d,
                     frozenset({"C"})),
        AttackScript("e", "activation code replaced inside the signed response",
                     _ac_only({3}, tls=False), _script_e,
                     frozenset({"E", "F", "J"})),
        AttackScript("f", "activation codes exposed at the compromised server",
                     _ac_only({2}), _script_f,
                     frozenset({"Bp", "G", "K"})),
    ]


ATTACKS_BY_ID = {s.id: s for s in attack_registry()}


# ---------------------------------------------------------------------------
# Negative controls: attacks that must NOT work, run to prove the checker
# and the protective checks are not trivially firing
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ControlScript:
    id: str
    title: str
    applicable: Callable
    run: Callable


def _ctl_tls_pins(world: World) -> None:
    code = world.request_profile(VICTIM)
    s2 = world.servers[SERVER2].identity
    impostor = ImpersonateServer(s2, world.servers[SERVER1].identity.domain,
                                 world.mnos[MNO1].atom)
    try:
        world.start_download(VICTIM, code=code, middlebox=impostor)
        raise AssertionError("tunnel failed to pin the dialed endpoint")
    except GateViolation:
        world.note("info", "control", "tunnel interception refused as expected")
    world.start_download(VICTIM, code=code)


def _ctl_tunnel_hides_code(world: World) -> None:
    code = world.request_profile(VICTIM)
    world.start_download(VICTIM, code=code)
    try:
        world.adversary_code(code.iac, code.s)
        raise AssertionError("activation code should be out of reach")
    except GateViolation:
        world.note("info", "control", "code underivable through the tunnel")


def _ctl_forgery_rejected(world: World) -> None:
    code = world.request_profile(VICTIM)
    world.start_download(VICTIM, code=code)
    victim = world.euiccs[VICTIM_EID].identity
    try:
        world.adversary.gate_send(CH_LPA_SERVER, "adv->server",
                                  seal("sign", victim.sk_u, Atom("anything")))
        raise AssertionError("honest-key signature should be unforgeable")
    except GateViolation:
        world.note("info", "control", "signature forgery refused by the gate")


def _ctl_oid_check_blocks_resign(world: World) -> None:
    code = world.request_profile(VICTIM)
    result = world.start_download(
        VICTIM, code=code,
        middlebox=CrossServerResign(world.servers[SERVER2].identity))
    assert not result.completed, "oid pinning should have blocked the re-signed handshake"


def _ctl_binding_names_euicc(world: World) -> None:
    own = world.euiccs[ADV_EID].identity
    world.request_profile(ADVERSARY_USER)
    code = world.request_profile(VICTIM)
    result = world.start_download(VICTIM, code=code,
                                  middlebox=SwapClientIdentity(own.sk_u, own.cert_u))
    assert not result.completed, "named profile binding should stop the swap"


def _ctl_registration_blocks_stolen_code(world: World) -> None:
    code = world.request_profile(VICTIM)
    stolen = world.adversary_code(code.iac, code.s, code.oid)
    result = world.start_download(ADVERSARY_USER, code=stolen)
    assert not result.completed, "registered eUICC id should stop a foreign device"


def _ctl_replayed_server_share(world: World) -> None:
    own = world.euiccs[ADV_EID].identity
    code = world.request_profile(ADVERSARY_USER)
    first = fake_client_download(world, SERVER1, own.cert_u, own.sk_u,
                                 iac=code.iac, notify=False)
    assert first is not None
    # fish the server's share out of the observed delivery and replay it as
    # the client share of a second run
    sig12 = None
    for entry in world.trace.entries:
        if isinstance(entry, MessageOp) and entry.direction == "server->adv":
            if not isinstance(entry.term, Pair):
                continue
            parts = _flatten(entry.term)
            if parts and parts[0] == Atom("m12-profile-delivery"):
                sig12 = parts[1]
    assert sig12 is not None
    q_s_prev = _flatten(sig12.body)[2]
    code2 = world.request_profile(ADVERSARY_USER)
    second = fake_client_download(world, SERVER1, own.cert_u, own.sk_u,
                                  iac=code2.iac, notify=False,
                                  qu_override=q_s_prev)
    if second is not None:
        # the replayed share pairs two server-side ephemerals; neither private
        # component ever leaves its owner, so the delivery must stay sealed
        assert not world.adversary.knows(second["enc"].body), \
            "replayed server share must not open the delivery"
    world.note("info", "control", "replayed key share gained nothing")


def _ctl_notification_replay(world: World) -> None:
    code = world.request_profile(VICTIM)
    world.start_download(VICTIM, code=code)
    m15 = None
    for entry in world.trace.entries:
        if isinstance(entry, MessageOp) and entry.direction.endswith("m15"):
            if entry.channel == CH_LPA_SERVER and "lpa->server" in entry.direction:
                m15 = entry.term
    assert m15 is not None
    dial = world.servers[SERVER1].identity.domain
    reply = adversary_request(world, dial, m15)
    assert reply == MSG_ERROR, "replayed notification should be refused"
    s3_count = len(world.trace.events_tagged("S3"))
    assert s3_count == 1, f"expected one notification acceptance, saw {s3_count}"


def _ctl_mno_proxy_contained(world: World) -> None:
    adv_atom = Atom(ADVERSARY_USER)
    if world.cfg.approach == "ds":
        world.proxy_order(MNO2, adv_atom, ADV_EID)
        world.start_download(ADVERSARY_USER)
    else:
        code = world.proxy_order(MNO2, adv_atom, None)
        world.start_download(ADVERSARY_USER, code=code)
    world.note("info", "control", "proxied order affects only the rogue operator")


def negative_controls(cfg: ScenarioConfig) -> list[ControlScript]:
    controls = [
        ControlScript("ctl-tls-pins", "tunnel pins the dialed endpoint",
                      lambda c: c.scenario == 5 and c.tls, _ctl_tls_pins),
        ControlScript("ctl-code-hidden", "tunnel hides the activation code",
                      lambda c: c.approach == "ac" and c.scenario == 1 and c.tls,
                      _ctl_tunnel_hides_code),
        ControlScript("ctl-no-forgery", "gate refuses honest-key forgeries",
                      lambda c: c.scenario == 1, _ctl_forgery_rejected),
        ControlScript("ctl-oid-pinning", "expected-oid check stops re-signing",
                      lambda c: c.scenario == 5 and not c.tls
                      and ("R2" in c.recs or "R1" in c.recs),
                      _ctl_oid_check_blocks_resign),
        ControlScript("ctl-named-binding", "named binding stops identity swap",
                      lambda c: c.scenario == 6 and not c.tls and "R9" in c.recs,
                      _ctl_binding_names_euicc),
        ControlScript("ctl-registered-eid", "registration stops stolen codes",
                      lambda c: c.approach == "ac" and c.scenario == 10
                      and "R3" in c.recs, _ctl_registration_blocks_stolen_code),
        ControlScript("ctl-share-replay", "replaying the server share is useless",
                      lambda c: c.approach == "ac" and c.scenario == 6 and not c.tls
                      and not c.recs, _ctl_replayed_server_share),
        ControlScript("ctl-notify-replay", "notification replay is refused",
                      lambda c: c.scenario == 1 and not c.tls and c.approach == "ac",
                      _ctl_notification_replay),
        ControlScript("ctl-proxy-contained", "rogue operator is contained",
                      lambda c: c.scenario == 7, _ctl_mno_proxy_contained),
    ]
    return [c for c in controls if c.applicable(cfg)]


# ---------------------------------------------------------------------------
# Capability audit and fuzzing
# ---------------------------------------------------------------------------

def audit_trace(trace) -> list[str]:
    """Re-derive every adversary send from the learns that preceded it."""
    failures = []
    k = Knowledge()
    for i, entry in enumerate(trace.entries):
        if isinstance(entry, LearnOp):
            k = k.learn(entry.term)
        elif isinstance(entry, MessageOp) and entry.by_adversary:
            if entry.unsafe:
                failures.append(f"entry {i}: unsafe injection present")
            elif not k.deduce(entry.term):
                failures.append(f"entry {i}: sent term not derivable at send time")
    return failures


def fuzz_adversary(world: World, steps: int, rng: random.Random) -> None:
    """Bounded random adversary: replays observed application messages and
    junk openings at the server, all through the gate."""
    honest_script(world)
    dial = world.servers[SERVER1].identity.domain
    observed = [e.term for e in world.trace.entries
                if isinstance(e, MessageOp) and e.channel == CH_LPA_SERVER]
    for _ in range(steps):
        roll = rng.random()
        if roll < 0.5 and observed:
            term = rng.choice(observed)
            if world.adversary.knows(term):
                adversary_request(world, dial, term)
        elif roll < 0.8:
            n = world.adversary.fresh_nonce("fuzz")
            adversary_request(world, dial, build_msg3(n, world.ci.ski))
        else:
            adversary_request(world, dial, Atom("fuzz-noise"))


# ---------------------------------------------------------------------------
# Narratives for the CLI's explain command
# ---------------------------------------------------------------------------

EXPLANATIONS = {
    "1": "Without the transport tunnel, the activation code crosses the open\n"
         "network inside the signed client response. The adversary reads it,\n"
         "types it into its own device, and downloads the victim's profile\n"
         "there. The order chain behind the server's acceptance (owner,\n"
         "intent, order) no longer exists, so Bp, G and K fail.",
    "2": "With every private key of the intended server, the adversary\n"
         "answers the victim's download itself (breaking all client-side\n"
         "goals and delivering a fake profile), or relays to the real\n"
         "server and swaps the final delivery, leaving the two ends with\n"
         "different beliefs about the installed profile (breaking G).",
    "3": "A compromised server elsewhere answers for the intended one: with\n"
         "the tunnel off, nothing pins the dialed name to the signer, the\n"
         "client only requires some authorized certificate. Every\n"
         "client-side goal fails and a fake profile is accepted.",
    "4": "Holding the victim eUICC's private key, the adversary runs the\n"
         "client handshake itself: the server authenticates 'the victim',\n"
         "derives keys with the adversary, and hands over the profile.",
    "5": "The adversary captures the victim's activation code in flight and\n"
         "re-signs the client response with its own compromised eUICC key;\n"
         "the server serves the victim's profile to a session whose key the\n"
         "adversary knows, so the profile leaks.",
    "6": "The adversary orders a profile for itself, then downloads it while\n"
         "presenting the victim's forged identity: the server's records now\n"
         "bind the victim's eUICC to an order the victim never made.",
    "7": "The adversary passes as the victim when ordering; the resulting\n"
         "profile (or code) lands in the adversary's device. The server's\n"
         "view traces back to no real user intent.",
    "8": "An activation code leaked anywhere along its path lets anyone\n"
         "download the associated profile onto any device; mobile service\n"
         "is then charged to the victim's account.",
    "9": "A subverted LPA both leaks the code it is given (same effect as a\n"
         "leak anywhere else) and can feed the secure element a different\n"
         "code, installing a profile tied to someone else's subscription.",
    "a": "The adversary orders a profile for the victim's eUICC under its\n"
         "own customer identity. When the victim's device next fetches from\n"
         "the default server, it may receive the adversary's profile: same\n"
         "operator name on the confirmation screen, wrong subscription.",
    "b": "The code handed to the victim is replaced with one the adversary\n"
         "ordered for itself; the victim installs a profile billed to and\n"
         "controlled by the adversary's subscription.",
    "c": "In-flight re-signing swaps which authorized server the client\n"
         "authenticates, while the real server still believes it owns the\n"
         "session: classic misbinding, prevented by naming the server oid\n"
         "inside the signed handshake.",
    "d": "The mirror image on the client side: the signed client response is\n"
         "re-signed under a different eUICC identity, leaving client and\n"
         "server with different beliefs about who is enrolled. Detected at\n"
         "the key exchange, prevented by naming the eUICC in the binding.",
    "e": "With the victim's signing key, the adversary rewrites the\n"
         "activation code inside the signed response: the victim completes\n"
         "a flawless-looking download of a profile from an order they never\n"
         "placed.",
    "f": "A fully compromised server exposes every activation code it\n"
         "issued; each such code is a ready-made profile theft, tunnel or\n"
         "no tunnel.",
}
