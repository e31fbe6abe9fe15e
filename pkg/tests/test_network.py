"""Channel semantics: the deduction gate, tunnel opacity and pinning,
private-channel isolation, and the post-hoc capability audit."""

import pytest

from rsplab.attacks import (ImpersonateServer, audit_trace, fake_client_download,
                            honest_script)
from rsplab.events import LearnOp, MessageOp
from rsplab.network import (CH_LPA_SERVER, GateViolation, adversary_request,
                            tls_connect)
from rsplab.roles import MSG_ERROR, build_msg3
from rsplab.scenarios import (ADV_EID, MNO1, SERVER1, SERVER2, VICTIM,
                              VICTIM_EID, ScenarioConfig, build_world)
from rsplab.terms import Atom, subterms


def run_world(approach="ac", scenario=1, tls=True):
    w = build_world(ScenarioConfig(approach, scenario, tls))
    code = w.request_profile(VICTIM)
    w.start_download(VICTIM, code=code)
    return w


class TestGate:
    def test_observed_terms_are_replayable(self):
        w = run_world(tls=False)
        msgs = [e.term for e in w.trace.entries
                if isinstance(e, MessageOp) and e.channel == CH_LPA_SERVER]
        assert msgs
        reply = adversary_request(w, Atom(SERVER1), msgs[0])
        assert reply is not None

    def test_unknown_secrets_are_not_sendable(self):
        w = run_world(tls=True)
        secret = w.servers[SERVER1].orders[0].iac
        with pytest.raises(GateViolation):
            w.adversary.gate_send(CH_LPA_SERVER, "adv->server", secret)

    def test_gate_failures_do_not_reach_the_trace(self):
        w = run_world(tls=True)
        before = len(w.trace.entries)
        secret = w.servers[SERVER1].orders[0].iac
        with pytest.raises(GateViolation):
            w.adversary.gate_send(CH_LPA_SERVER, "adv->server", secret)
        sent = [e for e in w.trace.entries[before:]
                if isinstance(e, MessageOp) and e.by_adversary]
        assert not sent


class TestTunnel:
    def test_tunnel_hides_application_traffic(self):
        w = run_world(tls=True)
        code_nonce = w.servers[SERVER1].orders[0].iac
        assert not w.adversary.knows(code_nonce)

    def test_open_channel_exposes_application_traffic(self):
        w = run_world(tls=False)
        code_nonce = w.servers[SERVER1].orders[0].iac
        assert w.adversary.knows(code_nonce)

    def test_disabling_the_tunnel_only_adds_knowledge(self):
        w_on = run_world(tls=True)
        w_off = run_world(tls=False)
        assert w_on.adversary.knowledge.base <= w_off.adversary.knowledge.base

    def test_dialed_name_pins_the_endpoint(self):
        w = build_world(ScenarioConfig("ds", 5, True))
        s2 = w.servers[SERVER2].identity
        mb = ImpersonateServer(s2, w.servers[SERVER1].identity.domain,
                               w.mnos[MNO1].atom)
        with pytest.raises(GateViolation):
            tls_connect(w, Atom(SERVER1), mb)

    def test_leaked_transport_key_lifts_the_pin(self):
        w = build_world(ScenarioConfig("ds", 2, True))
        s1 = w.servers[SERVER1].identity
        mb = ImpersonateServer(s1, s1.domain, w.mnos[MNO1].atom)
        tun = tls_connect(w, Atom(SERVER1), mb)
        assert tun.intercepted

    def test_anonymous_clients_always_connect(self):
        w = build_world(ScenarioConfig("ds", 1, True))
        n = w.adversary.fresh_nonce("probe")
        reply = adversary_request(w, Atom(SERVER1), build_msg3(n, w.ci.ski))
        assert reply != MSG_ERROR


class TestPrivateChannels:
    @pytest.mark.parametrize("approach", ["ds", "ac"])
    def test_honest_world_keeps_private_channels_opaque(self, approach):
        w = run_world(approach, 1, tls=True)
        private = [e.term for e in w.trace.entries
                   if isinstance(e, MessageOp)
                   and e.channel in ("mno_server_private", "lpa_euicc_internal")]
        assert private
        for term in private:
            for sub in subterms(term):
                assert sub not in w.adversary.knowledge.base

    def test_order_channel_proxy_reads_codes(self):
        w = build_world(ScenarioConfig("ac", 2, True))
        code = w.request_profile(VICTIM)
        assert w.adversary.knows(code.iac)

    def test_rogue_mno_proxy_can_inject_orders(self):
        w = build_world(ScenarioConfig("ac", 7, True))
        code = w.proxy_order("mno2", Atom("user-adv"), None)
        assert code is not None and w.adversary.knows(code.iac)

    def test_intact_mno_channel_refuses_injection(self):
        w = build_world(ScenarioConfig("ac", 1, True))
        with pytest.raises(GateViolation):
            w.proxy_order("mno2", Atom("user-adv"), None)


class TestAudit:
    def test_honest_and_attack_traces_audit_clean(self):
        from rsplab.attacks import attack_registry
        cfg = ScenarioConfig("ac", 6, False)
        w = build_world(cfg)
        honest_script(w)
        assert audit_trace(w.trace) == []
        for script in attack_registry():
            if not script.applicable(cfg):
                continue
            w = build_world(cfg)
            script.run(w)
            assert audit_trace(w.trace) == [], script.id

    def test_audit_flags_a_smuggled_term(self):
        w = build_world(ScenarioConfig("ds", 1, True))
        honest_script(w)
        secret = w.servers[SERVER1].orders[0].profile
        w.trace.append(MessageOp(CH_LPA_SERVER, "adv->server", secret,
                                 by_adversary=True))
        failures = audit_trace(w.trace)
        assert failures and "not derivable" in failures[0]

    def test_audit_replays_learning_in_order(self):
        w = build_world(ScenarioConfig("ac", 3, False))
        victim = w.euiccs[VICTIM_EID].identity
        w.request_profile(VICTIM)
        if w.cfg.approach == "ds":
            fake_client_download(w, SERVER1, victim.cert_u, victim.sk_u)
        assert audit_trace(w.trace) == []
