import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dy_oracle import oracle_deduce
from term_gen import TermGen
from rsplab.terms import (Atom, FreshSource, Knowledge, NULL, Nonce, Pair,
                          PubKey, SEnc, SealError, Sign, dh_pub, dh_shared,
                          encode, kdf, pairs, pub, seal, unpairs, unseal)


@pytest.fixture
def fresh():
    return FreshSource()


class TestFreshness:
    def test_fresh_values_never_repeat(self, fresh):
        seen = {fresh.fresh(kind, "x")
                for kind in ("nonce", "privkey", "dhpriv") for _ in range(50)}
        assert len(seen) == 150

    def test_two_sources_issue_identical_sequences(self):
        a, b = FreshSource(), FreshSource()
        for _ in range(20):
            assert a.nonce("n") == b.nonce("n")

    def test_unknown_kind_rejected(self, fresh):
        with pytest.raises(ValueError):
            fresh.fresh("quantum", "x")


class TestDh:
    def test_shared_secret_commutes(self, fresh):
        du, ds = fresh.dhpriv("du"), fresh.dhpriv("ds")
        assert dh_shared(du, dh_pub(ds)) == dh_shared(ds, dh_pub(du))

    def test_self_pairing_is_legal_and_distinct(self, fresh):
        du, ds = fresh.dhpriv("du"), fresh.dhpriv("ds")
        selfie = dh_shared(du, dh_pub(du))
        assert selfie != dh_shared(du, dh_pub(ds))

    def test_kdf_agrees_across_both_computations(self, fresh):
        du, ds = fresh.dhpriv("du"), fresh.dhpriv("ds")
        oid, eid = Atom("oid-1"), Atom("eid-7")
        assert kdf(dh_shared(du, dh_pub(ds)), oid, eid, "enc") \
            == kdf(dh_shared(ds, dh_pub(du)), oid, eid, "enc")


class TestSealing:
    def test_senc_round_trip(self, fresh):
        k, p = fresh.nonce("k"), Atom("payload")
        assert unseal("senc", k, seal("senc", k, p)) == p

    def test_senc_wrong_key_fails(self, fresh):
        k1, k2 = fresh.nonce("k1"), fresh.nonce("k2")
        with pytest.raises(SealError):
            unseal("senc", k2, seal("senc", k1, Atom("p")))

    def test_signature_round_trip_returns_body(self, fresh):
        sk = fresh.privkey("sk")
        assert unseal("sign", pub(sk), seal("sign", sk, Atom("m"))) == Atom("m")

    def test_signature_wrong_signer_fails(self, fresh):
        sk, other = fresh.privkey("a"), fresh.privkey("b")
        with pytest.raises(SealError):
            unseal("sign", pub(other), seal("sign", sk, Atom("m")))

    def test_mac_round_trip(self, fresh):
        k = fresh.nonce("k")
        assert unseal("mac", k, seal("mac", k, Atom("m"))) == Atom("m")

    def test_wrong_constructor_fails(self, fresh):
        k = fresh.nonce("k")
        with pytest.raises(SealError):
            unseal("senc", k, seal("mac", k, Atom("m")))


class TestTupleEncoding:
    def test_pairs_unpairs_inverse(self):
        items = [Atom("a"), Atom("b"), Atom("c"), Atom("d")]
        assert unpairs(pairs(items), 4) == items

    def test_unpairs_shape_mismatch(self):
        with pytest.raises(SealError):
            unpairs(Atom("a"), 3)


class TestEncoding:
    def test_encoding_is_injective_over_a_sample(self, fresh):
        rng = random.Random(5)
        gen = TermGen(rng)
        terms = {gen.term(4) for _ in range(300)}
        encoded = {encode(t) for t in terms}
        assert len(encoded) == len(terms)

    def test_encoding_stable(self, fresh):
        n = fresh.nonce("n-u")
        assert encode(SEnc(n, Pair(Atom("x"), NULL))) \
            == f"(senc (nonce {n.id} n-u) (pair x null))"


class TestDeduce:
    def test_decryption_with_known_key(self, fresh):
        k, p = fresh.nonce("k"), Pair(Atom("profile"), fresh.nonce("ki"))
        kb = Knowledge([k, SEnc(k, p)])
        assert kb.deduce(p)

    def test_public_dh_components_do_not_open_traffic(self, fresh):
        du, ds = fresh.dhpriv("du"), fresh.dhpriv("ds")
        p = fresh.nonce("p")
        k = kdf(dh_shared(du, dh_pub(ds)), Atom("oid"), Atom("eid"), "enc")
        kb = Knowledge([SEnc(k, p), dh_pub(du), dh_pub(ds)])
        assert not kb.deduce(p)

    def test_own_private_half_opens_traffic(self, fresh):
        du, ds = fresh.dhpriv("du"), fresh.dhpriv("ds")
        p = fresh.nonce("p")
        k = kdf(dh_shared(du, dh_pub(ds)), Atom("oid"), Atom("eid"), "enc")
        kb = Knowledge([du, dh_pub(ds), SEnc(k, p)])
        assert kb.deduce(p)
        assert oracle_deduce(kb.base, p)  # agreed independently

    def test_signature_reveals_body_not_key(self, fresh):
        sk, m = fresh.privkey("sk"), fresh.nonce("m")
        kb = Knowledge([Sign(sk, m)])
        assert kb.deduce(m)
        assert not kb.deduce(sk)

    def test_retroactive_decryption(self, fresh):
        k, p = fresh.nonce("k"), fresh.nonce("p")
        kb = Knowledge([SEnc(k, p)])
        assert not kb.deduce(p)
        assert kb.learn(k).deduce(p)

    def test_learn_is_monotone(self, fresh):
        rng = random.Random(11)
        gen = TermGen(rng)
        for _ in range(50):
            base = gen.base()
            kb = Knowledge(base)
            goal = gen.term(3)
            extra = gen.term(3)
            if kb.deduce(goal):
                assert kb.learn(extra).deduce(goal)


@settings(max_examples=200, deadline=None)
@given(st.integers(min_value=0, max_value=10**9), st.integers(min_value=1, max_value=6))
def test_deduce_matches_brute_force_oracle(seed, goals_per_base):
    rng = random.Random(seed)
    gen = TermGen(rng)
    base = gen.base()
    kb = Knowledge(base)
    for _ in range(goals_per_base):
        goal = gen.term(rng.randrange(1, 5))
        assert kb.deduce(goal) == oracle_deduce(base, goal), \
            f"disagreement on {encode(goal)} from {[encode(t) for t in base]}"
