"""
Symbolic message algebra and the attacker knowledge engine.

Every value that crosses a channel in the lab is a ``Term``: an immutable
tagged tree over atoms, nonces, asymmetric key pairs, Diffie-Hellman
components, pairs, signatures, symmetric encryptions, MACs, and derived
session keys.  Cryptography is symbolic: a signature verifies iff it was
built with the matching private key term, an encryption opens iff the exact
key term is supplied.  There are no probabilities and no bit strings.

Two design points matter for everything downstream:

  * DH shared secrets are stored in a canonical form (the two private
    components sorted by id), so the client-side and server-side
    computations of the same secret are structurally equal.  This gives
    exactly the commutativity the protocol needs without an equational
    rewriting engine.

  * ``Knowledge`` implements the network attacker's derivation rules:
    pairing/projection, signature and MAC bodies are readable (they
    authenticate, they do not hide), decryption requires a derivable key,
    DH secrets require one private and the matching public component, and
    constructors may be applied to anything derivable.  ``deduce`` is the
    single gate that decides what the adversary may send and what counts
    as a secrecy violation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Union


class SealError(ValueError):
    """Raised when open/verify of a sealed term fails (wrong key or shape)."""


# ---------------------------------------------------------------------------
# Term constructors
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Atom:
    """Public constant: identifiers, domain names, tags. Always derivable."""
    label: str

    def __repr__(self) -> str:
        return f"Atom({self.label})"


@dataclass(frozen=True)
class Nonce:
    """Fresh unguessable value (challenges, session ids, activation codes)."""
    id: int
    label: str = ""


@dataclass(frozen=True)
class PrivKey:
    id: int
    label: str = ""


@dataclass(frozen=True)
class PubKey:
    of: PrivKey


@dataclass(frozen=True)
class DhPriv:
    id: int
    label: str = ""


@dataclass(frozen=True)
class DhPub:
    of: DhPriv


@dataclass(frozen=True)
class DhShared:
    """Canonical DH shared secret: the two private components, id-sorted."""
    lo: DhPriv
    hi: DhPriv

    def __post_init__(self) -> None:
        if self.lo.id > self.hi.id:
            raise ValueError("DhShared must be built through dh_shared()")


@dataclass(frozen=True)
class Pair:
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class Sign:
    """Signature by `key` over `body`; reveals body, proves origin."""
    key: PrivKey
    body: "Term"


@dataclass(frozen=True)
class SEnc:
    """Symmetric encryption; the only confidentiality-providing constructor."""
    key: "Term"
    body: "Term"


@dataclass(frozen=True)
class Mac:
    key: "Term"
    body: "Term"


@dataclass(frozen=True)
class Kdf:
    """Session key derived from a DH secret, the server OID and eUICC id."""
    shared: "Term"
    oid: "Term"
    eid: "Term"
    which: str  # "enc" or "mac"

    def __post_init__(self) -> None:
        if self.which not in ("enc", "mac"):
            raise ValueError(f"bad kdf tag {self.which!r}")


Term = Union[Atom, Nonce, PrivKey, PubKey, DhPriv, DhPub, DhShared,
             Pair, Sign, SEnc, Mac, Kdf]

NULL = Atom("null")


def is_null(t: Term) -> bool:
    return t == NULL


# ---------------------------------------------------------------------------
# Freshness
# ---------------------------------------------------------------------------

class FreshSource:
    """World-scoped counter; two worlds built the same way issue the same ids."""

    def __init__(self) -> None:
        self._next = 0

    def _take(self) -> int:
        n = self._next
        self._next += 1
        return n

    def nonce(self, label: str = "") -> Nonce:
        return Nonce(self._take(), label)

    def privkey(self, label: str = "") -> PrivKey:
        return PrivKey(self._take(), label)

    def dhpriv(self, label: str = "") -> DhPriv:
        return DhPriv(self._take(), label)

    def fresh(self, kind: str, label: str = "") -> Term:
        """Uniform entry point: kind is one of nonce / privkey / dhpriv."""
        if kind == "nonce":
            return self.nonce(label)
        if kind == "privkey":
            return self.privkey(label)
        if kind == "dhpriv":
            return self.dhpriv(label)
        raise ValueError(f"unknown fresh kind {kind!r}")


# ---------------------------------------------------------------------------
# Operations on terms
# ---------------------------------------------------------------------------

def pub(sk: PrivKey) -> PubKey:
    return PubKey(sk)


def dh_pub(d: DhPriv) -> DhPub:
    return DhPub(d)


def dh_shared(d: DhPriv, q: DhPub) -> DhShared:
    """Shared secret; dh_shared(a, pub(b)) == dh_shared(b, pub(a))."""
    a, b = d, q.of
    if a.id <= b.id:
        return DhShared(a, b)
    return DhShared(b, a)


def kdf(shared: Term, oid: Term, eid: Term, which: str) -> Kdf:
    return Kdf(shared, oid, eid, which)


def pairs(items: Iterable[Term]) -> Term:
    """Right-nested pair encoding of a non-empty sequence."""
    items = list(items)
    if not items:
        raise ValueError("cannot encode empty sequence")
    out = items[-1]
    for t in reversed(items[:-1]):
        out = Pair(t, out)
    return out


def unpairs(t: Term, n: int) -> list[Term]:
    """Inverse of pairs() for a known arity; raises SealError on shape mismatch."""
    out: list[Term] = []
    for _ in range(n - 1):
        if not isinstance(t, Pair):
            raise SealError(f"expected {n}-tuple, ran out at {len(out)}")
        out.append(t.left)
        t = t.right
    out.append(t)
    return out


def seal(kind: str, key: Term, body: Term) -> Term:
    if kind == "sign":
        if not isinstance(key, PrivKey):
            raise ValueError("sign needs a PrivKey")
        return Sign(key, body)
    if kind == "senc":
        return SEnc(key, body)
    if kind == "mac":
        return Mac(key, body)
    raise ValueError(f"unknown seal kind {kind!r}")


def unseal(kind: str, key: Term, sealed: Term) -> Term:
    """Open a sealed term; SealError on any mismatch (receiver must abort).

    For signatures the key is the signer's PubKey and the signed body is
    returned on success, i.e. verification doubles as extraction.
    """
    if kind == "sign":
        if not isinstance(sealed, Sign):
            raise SealError("not a signature")
        if not isinstance(key, PubKey) or PubKey(sealed.key) != key:
            raise SealError("signature key mismatch")
        return sealed.body
    if kind == "senc":
        if not isinstance(sealed, SEnc):
            raise SealError("not a ciphertext")
        if sealed.key != key:
            raise SealError("decryption key mismatch")
        return sealed.body
    if kind == "mac":
        if not isinstance(sealed, Mac):
            raise SealError("not a mac")
        if sealed.key != key:
            raise SealError("mac key mismatch")
        return sealed.body
    raise ValueError(f"unknown seal kind {kind!r}")


def subterms(t: Term) -> Iterator[Term]:
    """All subterms including t itself (pre-order)."""
    yield t
    if isinstance(t, Pair):
        yield from subterms(t.left)
        yield from subterms(t.right)
    elif isinstance(t, Sign):
        yield from subterms(t.key)
        yield from subterms(t.body)
    elif isinstance(t, (SEnc, Mac)):
        yield from subterms(t.key)
        yield from subterms(t.body)
    elif isinstance(t, PubKey):
        yield from subterms(t.of)
    elif isinstance(t, DhPub):
        yield from subterms(t.of)
    elif isinstance(t, DhShared):
        yield from subterms(t.lo)
        yield from subterms(t.hi)
    elif isinstance(t, Kdf):
        yield from subterms(t.shared)
        yield from subterms(t.oid)
        yield from subterms(t.eid)


# ---------------------------------------------------------------------------
# Canonical textual encoding (trace dumps, counterexample slices)
# ---------------------------------------------------------------------------

def encode(t: Term) -> str:
    """Injective s-expression encoding; stable across runs with one seed."""
    if isinstance(t, Atom):
        return t.label
    if isinstance(t, Nonce):
        return f"(nonce {t.id} {t.label})" if t.label else f"(nonce {t.id})"
    if isinstance(t, PrivKey):
        return f"(priv {t.id} {t.label})" if t.label else f"(priv {t.id})"
    if isinstance(t, PubKey):
        return f"(pub {encode(t.of)})"
    if isinstance(t, DhPriv):
        return f"(dpriv {t.id} {t.label})" if t.label else f"(dpriv {t.id})"
    if isinstance(t, DhPub):
        return f"(dpub {encode(t.of)})"
    if isinstance(t, DhShared):
        return f"(dh {t.lo.id} {t.hi.id})"
    if isinstance(t, Pair):
        return f"(pair {encode(t.left)} {encode(t.right)})"
    if isinstance(t, Sign):
        return f"(sign {encode(t.key)} {encode(t.body)})"
    if isinstance(t, SEnc):
        return f"(senc {encode(t.key)} {encode(t.body)})"
    if isinstance(t, Mac):
        return f"(mac {encode(t.key)} {encode(t.body)})"
    if isinstance(t, Kdf):
        return f"(kdf {encode(t.shared)} {encode(t.oid)} {encode(t.eid)} {t.which})"
    raise TypeError(f"not a term: {t!r}")


# ---------------------------------------------------------------------------
# Attacker knowledge and deduction
# ---------------------------------------------------------------------------

class Knowledge:
    """Immutable set of observed terms plus the derivation rules.

    ``learn`` returns a new Knowledge (monotone).  ``deduce`` is sound and
    complete for the rule set described in the module docstring: it first
    saturates the base under destructors (projection, body extraction,
    conditional decryption) and then answers goal-directed constructor
    queries against the saturated set.
    """

    __slots__ = ("base", "_closure")

    def __init__(self, base: Iterable[Term] = ()) -> None:
        self.base: frozenset = frozenset(base)
        self._closure: Optional[frozenset] = None

    def learn(self, *ts: Term) -> "Knowledge":
        new = self.base.union(ts)
        if new == self.base:
            return self
        return Knowledge(new)

    def __contains__(self, t: Term) -> bool:
        return t in self.base

    def __len__(self) -> int:
        return len(self.base)

    # -- destructor saturation ---------------------------------------------

    def closure(self) -> frozenset:
        if self._closure is not None:
            return self._closure
        known = set(self.base)
        while True:
            added = False
            for t in list(known):
                if isinstance(t, Pair):
                    for part in (t.left, t.right):
                        if part not in known:
                            known.add(part)
                            added = True
                elif isinstance(t, (Sign, Mac)):
                    if t.body not in known:
                        known.add(t.body)
                        added = True
                elif isinstance(t, SEnc):
                    if t.body not in known and _derivable(t.key, known, set()):
                        known.add(t.body)
                        added = True
            if not added:
                break
        self._closure = frozenset(known)
        return self._closure

    def deduce(self, goal: Term) -> bool:
        return _derivable(goal, self.closure(), set())


def _derivable(goal: Term, known: set | frozenset, pending: set) -> bool:
    """Goal-directed constructor check over a destructor-saturated set."""
    if goal in known:
        return True
    if goal in pending:  # cycle guard (DhShared <-> components)
        return False
    if isinstance(goal, Atom):
        return True
    if isinstance(goal, (Nonce, PrivKey, DhPriv)):
        return False  # fresh values are never guessable
    pending = pending | {goal}
    if isinstance(goal, Pair):
        return (_derivable(goal.left, known, pending)
                and _derivable(goal.right, known, pending))
    if isinstance(goal, Sign):
        return (_derivable(goal.key, known, pending)
                and _derivable(goal.body, known, pending))
    if isinstance(goal, (SEnc, Mac)):
        return (_derivable(goal.key, known, pending)
                and _derivable(goal.body, known, pending))
    if isinstance(goal, PubKey):
        return _derivable(goal.of, known, pending)
    if isinstance(goal, DhPub):
        return _derivable(goal.of, known, pending)
    if isinstance(goal, DhShared):
        lo, hi = goal.lo, goal.hi
        if _derivable(lo, known, pending) and _derivable(DhPub(hi), known, pending):
            return True
        return _derivable(hi, known, pending) and _derivable(DhPub(lo), known, pending)
    if isinstance(goal, Kdf):
        return (_derivable(goal.shared, known, pending)
                and _derivable(goal.oid, known, pending)
                and _derivable(goal.eid, known, pending))
    raise TypeError(f"not a term: {goal!r}")


def deduce(k: Knowledge, goal: Term) -> bool:
    return k.deduce(goal)


def learn(k: Knowledge, t: Term) -> Knowledge:
    return k.learn(t)
