"""
Certificate issuance and verification.

One GSMA-style certificate issuer (CI) roots all trust.  A download server
holds three certificates sharing one subject and one OID: a TLS certificate
for its domain name, an authentication certificate, and a profile-binding
certificate; the latter two differ only in policy.  An eUICC holds a single
certificate issued directly by the CI.

Certificates are plain terms (a CI signature over the field tuple), so they
travel in messages and the adversary can read, store and replay them like
any other term.  Compromising an identity leaks its private keys and its
(public) certificates to the adversary and drops a marker event into the
trace; goal exclusions are computed from those markers alone.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .events import Event
from .terms import (Atom, NULL, PrivKey, PubKey, Sign, Term,
                    SealError, is_null, pairs, pub, seal, unpairs, unseal)

POLICY_TLS = Atom("policy-tls")
POLICY_SERVER_AUTH = Atom("policy-server-auth")
POLICY_PROFILE_BINDING = Atom("policy-profile-binding")
POLICY_EUICC = Atom("policy-euicc")

_CERT_TAG = Atom("cert")


class CertError(ValueError):
    """Certificate did not verify or does not fit the context of use."""


@dataclass(frozen=True)
class Certificate:
    subject: Atom
    subject_key: PubKey
    oid: Term                 # server OID atom, or null for eUICC certs
    policy: Atom
    issuer_ski: Atom

    @property
    def term(self) -> Term:
        raise NotImplementedError  # built via CiRoot.issue (needs the CI key)


def cert_body(subject: Atom, subject_key: PubKey, oid: Term,
              policy: Atom, issuer_ski: Atom) -> Term:
    return pairs([_CERT_TAG, subject, subject_key, oid, policy, issuer_ski])


def parse_certificate(term: Term) -> tuple[Certificate, Sign]:
    """Split a transported certificate term into fields + signature."""
    if not isinstance(term, Sign):
        raise CertError("certificate is not a signed term")
    try:
        tag, subject, key, oid, policy, ski = unpairs(term.body, 6)
    except SealError as exc:
        raise CertError(f"malformed certificate body: {exc}") from exc
    if tag != _CERT_TAG or not isinstance(subject, Atom) \
            or not isinstance(key, PubKey) or not isinstance(policy, Atom) \
            or not isinstance(ski, Atom):
        raise CertError("malformed certificate fields")
    return Certificate(subject, key, oid, policy, ski), term


class CiRoot:
    """The single trust root of a world."""

    def __init__(self, sk: PrivKey, ski_label: str = "ski-ci") -> None:
        self.sk = sk
        self.ski = Atom(ski_label)

    @property
    def pk(self) -> PubKey:
        return pub(self.sk)

    def issue(self, subject: Atom, subject_key: PubKey, oid: Term,
              policy: Atom) -> Term:
        return seal("sign", self.sk,
                    cert_body(subject, subject_key, oid, policy, self.ski))


def verify_cert(cert_term: Term, ci: "CiRoot", policy: Atom) -> Certificate:
    """Deterministic, total check: CI signature, SKI and policy must match."""
    cert, signed = parse_certificate(cert_term)
    try:
        unseal("sign", ci.pk, signed)
    except SealError as exc:
        raise CertError(f"issuer signature invalid: {exc}") from exc
    if cert.issuer_ski != ci.ski:
        raise CertError("unknown issuer key identifier")
    if cert.policy != policy:
        raise CertError(
            f"certificate policy {cert.policy.label} unfit for context "
            f"{policy.label}")
    return cert


# ---------------------------------------------------------------------------
# Identities
# ---------------------------------------------------------------------------

@dataclass
class ServerIdentity:
    domain: Atom               # dialable name, subject of the TLS cert
    subject: Atom              # shared subject of the auth/binding certs
    oid: Atom
    sk_tls: PrivKey
    sk_sa: PrivKey
    sk_sp: PrivKey
    cert_st: Term
    cert_sa: Term
    cert_sp: Term


@dataclass
class EuiccIdentity:
    eid: Atom
    sk_u: PrivKey
    cert_u: Term
    default_server: Optional[Atom] = None      # domain pre-provisioned on-chip
    default_server_oid: Optional[Atom] = None  # R2 extension (held by the LPA)
    seq_counter: int = 0                       # present but unused


def new_ci(fresh) -> CiRoot:
    return CiRoot(fresh.privkey("sk-ci"))


def issue_server(ci: CiRoot, fresh, domain: str, oid: str,
                 subject: Optional[str] = None) -> ServerIdentity:
    dom = Atom(domain)
    subj = Atom(subject or domain.split(".")[0])
    oid_atom = Atom(oid)
    sk_tls = fresh.privkey(f"sk-tls-{domain}")
    sk_sa = fresh.privkey(f"sk-sa-{domain}")
    sk_sp = fresh.privkey(f"sk-sp-{domain}")
    return ServerIdentity(
        domain=dom, subject=subj, oid=oid_atom,
        sk_tls=sk_tls, sk_sa=sk_sa, sk_sp=sk_sp,
        cert_st=ci.issue(dom, pub(sk_tls), oid_atom, POLICY_TLS),
        cert_sa=ci.issue(subj, pub(sk_sa), oid_atom, POLICY_SERVER_AUTH),
        cert_sp=ci.issue(subj, pub(sk_sp), oid_atom, POLICY_PROFILE_BINDING),
    )


def issue_euicc(ci: CiRoot, fresh, eid: str) -> EuiccIdentity:
    eid_atom = Atom(eid)
    sk_u = fresh.privkey(f"sk-u-{eid}")
    return EuiccIdentity(
        eid=eid_atom, sk_u=sk_u,
        cert_u=ci.issue(eid_atom, pub(sk_u), NULL, POLICY_EUICC),
    )


# ---------------------------------------------------------------------------
# Targeted compromise
# ---------------------------------------------------------------------------

def compromise_server(world, domain: str, keys: frozenset = frozenset({"tls", "sa", "sp"})) -> None:
    """Leak the named private keys (certificates are public anyway) and mark it."""
    srv = world.servers[domain]
    ident = srv.identity
    leaked: list[Term] = [ident.cert_st, ident.cert_sa, ident.cert_sp]
    if "tls" in keys:
        leaked.append(ident.sk_tls)
    if "sa" in keys:
        leaked.append(ident.sk_sa)
    if "sp" in keys:
        leaked.append(ident.sk_sp)
    world.adversary.grant(*leaked)
    world.trace.append(Event("CompromiseServer", (ident.subject,)))
    world.compromised_servers.add(domain)
    if keys == {"tls", "sa", "sp"} or keys == frozenset({"tls", "sa", "sp"}):
        world.order_channel_proxies.add(domain)


def compromise_euicc(world, eid: str) -> None:
    dev = world.euiccs[eid]
    world.adversary.grant(dev.identity.sk_u, dev.identity.cert_u)
    world.trace.append(Event("CompromiseCert", (dev.identity.eid,)))
    world.compromised_euiccs.add(eid)


def compromise_mno(world, mno: str) -> None:
    """Adversary becomes a proxy on this MNO's private channel to its server."""
    world.adversary_mno_proxies.add(mno)
    world.trace.append(Event("CompromiseMno", (Atom(mno),)))


def compromise_user_channel(world, mode: str) -> None:
    """User/LPA-to-MNO channel fraud: impersonate, order-for-euicc, read, spoof."""
    if mode not in ("impersonate-user", "order-for-euicc", "read-code",
                    "spoof-code", "lpa"):
        raise ValueError(f"unknown fraud mode {mode!r}")
    world.user_channel_fraud.add(mode)
    world.trace.append(Event("ChannelFraud", (Atom(mode),)))
