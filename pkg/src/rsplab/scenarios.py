"""
Scenario configurations and world building.

A configuration is approach x scenario x transport-tunnel flag, plus the
hardening-recommendation set and two behavioral switches (strict LPA,
careless user).  Scenario numbering:

  1 honest baseline          7 second, compromised MNO exists
  2 the download server      8 ordering fraud: adversary passes as the user
  3 the user's eUICC key     9 ordering fraud: order names the victim's eUICC
  4 the user's LPA          10 activation code leaks out of band
  5 a second, compromised   11 activation code spoofed on delivery
    server exists
  6 the adversary's own
    eUICC key

Scenario 9 exists only in the default-server approach, 10 and 11 only in
the activation-code approach.  Recommendations: R1 (code carries the server
oid), R2 (LPA stores the default server's oid), R3 (orders register the
eUICC id), R7 (oid inside signed handshake messages), R8 (server compares
the dialed name), R9 (eUICC id inside the signed profile binding).  R10 is
shorthand for the full hardening set of the given approach.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

from .events import Event
from .pki import (compromise_euicc, compromise_mno, compromise_server,
                  compromise_user_channel, issue_euicc, issue_server, new_ci)
from .roles import EuiccDevice, MnoProcess, ServerProcess
from .terms import Atom
from .world import ADVERSARY_USER, UserAgent, World

APPROACHES = ("ds", "ac")
DS_SCENARIOS = tuple(range(1, 10))
AC_SCENARIOS = (1, 2, 3, 4, 5, 6, 7, 8, 10, 11)
ALL_RECS = ("R1", "R2", "R3", "R7", "R8", "R9")

SERVER1 = "smdp1.example"
SERVER2 = "smdp2.example"
VICTIM = "user1"
BYSTANDER = "user2"
VICTIM_EID = "eid-1"
BYSTANDER_EID = "eid-2"
ADV_EID = "eid-adv"
MNO1 = "mno1"
MNO2 = "mno2"


class ConfigError(ValueError):
    pass


def scenario_ids(approach: str) -> tuple:
    return DS_SCENARIOS if approach == "ds" else AC_SCENARIOS


def expand_recs(recs, approach: str) -> frozenset:
    out = set()
    for r in recs:
        r = r.strip().upper()
        if not r:
            continue
        if r == "R10":
            out |= {"R2", "R7", "R9"} if approach == "ds" else {"R1", "R3", "R7", "R9"}
        elif r in ALL_RECS:
            out.add(r)
        else:
            raise ConfigError(f"unknown recommendation {r!r}")
    return frozenset(out)


@dataclass(frozen=True)
class ScenarioConfig:
    approach: str                 # "ds" | "ac"
    scenario: int
    tls: bool
    recs: frozenset = frozenset()
    lpa_strict: bool = True
    careless_user: bool = False

    def __post_init__(self) -> None:
        if self.approach not in APPROACHES:
            raise ConfigError(f"approach must be ds or ac, got {self.approach!r}")
        valid = DS_SCENARIOS if self.approach == "ds" else AC_SCENARIOS
        if self.scenario not in valid:
            raise ConfigError(
                f"scenario {self.scenario} is not defined for approach {self.approach}")
        for r in self.recs:
            if r in ("R2",) and self.approach != "ds":
                raise ConfigError("R2 applies to the default-server approach only")
            if r in ("R1", "R3") and self.approach != "ac":
                raise ConfigError(f"{r} applies to the activation-code approach only")

    def describe(self) -> str:
        recs = ",".join(sorted(self.recs)) or "-"
        return (f"approach={self.approach} scenario={self.scenario} "
                f"tls={'on' if self.tls else 'off'} recs={recs}")


def parse_config(text: str) -> ScenarioConfig:
    """key=value per line; blank lines and #-comments ignored."""
    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value")
        key, val = (x.strip() for x in line.split("=", 1))
        values[key] = val
    approach = values.get("approach", "ds").lower()
    approach = {"default_server": "ds", "default-server": "ds",
                "activation_code": "ac", "activation-code": "ac"}.get(approach, approach)
    bools = {"true": True, "yes": True, "on": True, "1": True,
             "false": False, "no": False, "off": False, "0": False}

    def as_bool(key: str, default: bool) -> bool:
        if key not in values:
            return default
        try:
            return bools[values[key].lower()]
        except KeyError:
            raise ConfigError(f"{key} must be a boolean, got {values[key]!r}")

    try:
        scenario = int(values.get("scenario", "1"))
    except ValueError:
        raise ConfigError(f"scenario must be an integer")
    recs = expand_recs(values.get("recs", "").split(","), approach)
    return ScenarioConfig(
        approach=approach, scenario=scenario,
        tls=as_bool("tls", True), recs=recs,
        lpa_strict=as_bool("lpa_strict", True),
        careless_user=as_bool("careless_user", False))


# ---------------------------------------------------------------------------
# World building
# ---------------------------------------------------------------------------

def build_world(cfg: ScenarioConfig) -> World:
    """Two servers, two operators, a victim, an honest bystander, and the
    adversary with a device of its own; compromises applied per scenario."""
    world = World(cfg)
    world.ci = new_ci(world.fresh)

    s1 = issue_server(world.ci, world.fresh, SERVER1, "oid-1", "sm-dp-1")
    s2 = issue_server(world.ci, world.fresh, SERVER2, "oid-2", "sm-dp-2")
    for ident in (s1, s2):
        world.servers[ident.domain.label] = ServerProcess(world, ident)
        world.emit(Event("AUTHORIZE", (ident.subject,)))

    world.mnos[MNO1] = MnoProcess(MNO1, Atom(MNO1), SERVER1)
    world.mnos[MNO2] = MnoProcess(MNO2, Atom(MNO2), SERVER1)

    for eid, owner in ((VICTIM_EID, VICTIM), (BYSTANDER_EID, BYSTANDER),
                       (ADV_EID, ADVERSARY_USER)):
        ident = issue_euicc(world.ci, world.fresh, eid)
        ident.default_server = Atom(SERVER1)
        if "R2" in cfg.recs:
            ident.default_server_oid = s1.oid
        world.euiccs[eid] = EuiccDevice(world, ident, owner)
        world.users[owner] = UserAgent(owner, Atom(owner), eid, MNO1)
        world.emit(Event("OWNER", (Atom(owner), ident.eid)))

    _apply_compromises(world, cfg)
    return world


def _apply_compromises(world: World, cfg: ScenarioConfig) -> None:
    scenario = cfg.scenario
    if scenario == 1:
        return
    if scenario == 2:
        # the intended server falls, and with it any other server identity
        # the same operator of compromised infrastructure can present
        compromise_server(world, SERVER1)
        compromise_server(world, SERVER2)
    elif scenario == 3:
        compromise_euicc(world, VICTIM_EID)
    elif scenario == 4:
        world.compromised_lpa_users.add(VICTIM)
        compromise_user_channel(world, "lpa")
    elif scenario == 5:
        compromise_server(world, SERVER2)
    elif scenario == 6:
        compromise_euicc(world, ADV_EID)
    elif scenario == 7:
        compromise_mno(world, MNO2)
    elif scenario == 8:
        compromise_user_channel(world, "impersonate-user")
    elif scenario == 9:
        compromise_user_channel(world, "order-for-euicc")
    elif scenario == 10:
        compromise_user_channel(world, "read-code")
    elif scenario == 11:
        compromise_user_channel(world, "spoof-code")
    else:
        raise ConfigError(f"scenario {scenario} not wired")


def apply_recommendations(cfg: ScenarioConfig, recs) -> ScenarioConfig:
    return replace(cfg, recs=expand_recs(recs, cfg.approach))
