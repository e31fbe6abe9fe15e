import pytest

from rsplab.fixture import GOALS, expected_matrix, scenario_rows
from rsplab.scenarios import (AC_SCENARIOS, DS_SCENARIOS, ConfigError,
                              ScenarioConfig, build_world, expand_recs,
                              parse_config, scenario_ids)


class TestConfig:
    def test_scenario_approach_compatibility(self):
        ScenarioConfig("ds", 9, True)
        ScenarioConfig("ac", 10, True)
        with pytest.raises(ConfigError):
            ScenarioConfig("ac", 9, True)
        with pytest.raises(ConfigError):
            ScenarioConfig("ds", 10, True)

    def test_rec_approach_compatibility(self):
        with pytest.raises(ConfigError):
            ScenarioConfig("ds", 1, True, recs=frozenset({"R1"}))
        with pytest.raises(ConfigError):
            ScenarioConfig("ac", 1, True, recs=frozenset({"R2"}))
        ScenarioConfig("ds", 1, True, recs=frozenset({"R2", "R7", "R9"}))

    def test_r10_expands_per_approach(self):
        assert expand_recs(["R10"], "ds") == frozenset({"R2", "R7", "R9"})
        assert expand_recs(["R10"], "ac") == frozenset({"R1", "R3", "R7", "R9"})

    def test_unknown_rec_rejected(self):
        with pytest.raises(ConfigError):
            expand_recs(["R42"], "ds")

    def test_parse_config_round_trip(self):
        text = """
        # download lab scenario
        approach = activation_code
        scenario = 6
        tls = off
        recs = R1, R3
        lpa_strict = no
        """
        cfg = parse_config(text)
        assert cfg == ScenarioConfig("ac", 6, False,
                                     recs=frozenset({"R1", "R3"}),
                                     lpa_strict=False)

    def test_parse_config_rejects_garbage(self):
        with pytest.raises(ConfigError):
            parse_config("approach ds")
        with pytest.raises(ConfigError):
            parse_config("tls = sometimes")


class TestWorldBuilding:
    @pytest.mark.parametrize("approach", ["ds", "ac"])
    def test_every_fixture_row_is_buildable(self, approach):
        for scenario in scenario_ids(approach):
            for tls in (True, False):
                w = build_world(ScenarioConfig(approach, scenario, tls))
                assert len(w.servers) == 2
                assert len(w.euiccs) == 3
                assert len(w.trace.events_tagged("OWNER")) == 3

    def test_fixture_covers_exactly_the_scenario_rows(self):
        matrix = expected_matrix()
        assert {k for k in matrix if k[0] == "ds"} == {("ds", s) for s in DS_SCENARIOS}
        assert {k for k in matrix if k[0] == "ac"} == {("ac", s) for s in AC_SCENARIOS}
        for rows in matrix.values():
            assert set(rows) == set(GOALS)

    def test_fixture_totals_570_resolved_cells(self):
        total = sum(len(rows) for rows in expected_matrix().values()) * 2
        assert total == 570

    def test_scenario_one_has_no_markers(self):
        w = build_world(ScenarioConfig("ds", 1, True))
        for tag in ("CompromiseServer", "CompromiseCert", "CompromiseMno",
                    "ChannelFraud"):
            assert not w.trace.events_tagged(tag)

    def test_each_compromise_is_exactly_one_marker(self):
        for approach, scenario, tag, count in [
                ("ds", 2, "CompromiseServer", 2),
                ("ds", 3, "CompromiseCert", 1),
                ("ds", 5, "CompromiseServer", 1),
                ("ac", 6, "CompromiseCert", 1),
                ("ds", 7, "CompromiseMno", 1),
                ("ac", 10, "ChannelFraud", 1)]:
            w = build_world(ScenarioConfig(approach, scenario, True))
            assert len(w.trace.events_tagged(tag)) == count, (approach, scenario)

    def test_worlds_with_same_config_are_identical(self):
        from rsplab.attacks import honest_script
        traces = []
        for _ in range(2):
            w = build_world(ScenarioConfig("ac", 1, False))
            honest_script(w)
            traces.append(w.trace.render())
        assert traces[0] == traces[1]
