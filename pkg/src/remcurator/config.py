"""Configuration for the service and CLI.

INI file with four kinds of section; every key is optional:

    [service]   listen = 127.0.0.1:8402
                storage = ./remcurator-data
                clock = wall | simulated
                sim_start = 2008-08-01T00:00:00Z   (required when simulated)
    [fetch]     deadline_seconds = 10
                max_in_flight = 8
                script = scenario.json             (switches to the simulated web)
    [thresholds] minor = 0.80
                wrong_content = 0.20
    [member:ia] kind = archive | cache | search
                lag_days = 183
                endpoint = https://...
                lookup = true                      (search members only)

REMCURATOR_LISTEN and REMCURATOR_STORAGE override the file.  See
docs/config-format.md for the full story.
"""

from __future__ import annotations

import configparser
import os
from dataclasses import dataclass
from datetime import datetime, timedelta
from pathlib import Path

from remcurator.clock import SimulatedClock, WallClock, parse_rfc3339
from remcurator.curator import Curator
from remcurator.fingerprint import DEFAULT_MINOR_THRESHOLD, DEFAULT_WRONG_CONTENT_THRESHOLD
from remcurator.webfetch import (
    DEFAULT_DEADLINE,
    DEFAULT_MAX_IN_FLIGHT,
    HttpFetcher,
    SimulatedWeb,
    load_script,
)
from remcurator.wi import Capability, MemberKind, SimulatedMember, WIMemberDescriptor, WIRegistry

ENV_LISTEN = "REMCURATOR_LISTEN"
ENV_STORAGE = "REMCURATOR_STORAGE"

_DEFAULT_CAPS = {
    MemberKind.ARCHIVE: frozenset({Capability.PUSH, Capability.LOOKUP, Capability.HOLDINGS}),
    MemberKind.CACHE: frozenset({Capability.LOOKUP}),
    MemberKind.SEARCH: frozenset({Capability.SEARCH}),
}


class ConfigError(Exception):
    pass


@dataclass(frozen=True)
class MemberConfig:
    member_id: str
    kind: MemberKind
    lag: timedelta = timedelta(0)
    endpoint: str = ""
    lookup: bool = False

    def descriptor(self) -> WIMemberDescriptor:
        caps = _DEFAULT_CAPS[self.kind]
        if self.lookup:
            caps = caps | {Capability.LOOKUP}
        return WIMemberDescriptor(self.member_id, self.kind, caps, self.lag, self.endpoint)


@dataclass(frozen=True)
class ServiceConfig:
    host: str = "127.0.0.1"
    port: int = 8402
    storage: Path = Path("remcurator-data")
    clock_kind: str = "wall"
    sim_start: datetime | None = None
    deadline: float = DEFAULT_DEADLINE
    max_in_flight: int = DEFAULT_MAX_IN_FLIGHT
    script: Path | None = None
    minor_threshold: float = DEFAULT_MINOR_THRESHOLD
    wrong_threshold: float = DEFAULT_WRONG_CONTENT_THRESHOLD
    members: tuple = (
        MemberConfig("archive", MemberKind.ARCHIVE),
        MemberConfig("cache", MemberKind.CACHE),
        MemberConfig("search", MemberKind.SEARCH),
    )


def _parse_listen(value: str) -> tuple[str, int]:
    host, sep, port = value.rpartition(":")
    if not sep or not host:
        raise ConfigError(f"listen must be host:port, got {value!r}")
    try:
        return host, int(port)
    except ValueError:
        raise ConfigError(f"listen port must be an integer, got {port!r}")


def load_config(path: "str | Path | None" = None, env=os.environ) -> ServiceConfig:
    defaults = ServiceConfig()
    parser = configparser.ConfigParser()
    base = Path(".")
    if path is not None:
        path = Path(path)
        if not path.exists():
            raise ConfigError(f"config file {path} not found")
        parser.read(path, encoding="utf-8")
        base = path.parent

    host, port = defaults.host, defaults.port
    storage = defaults.storage
    clock_kind = defaults.clock_kind
    sim_start = defaults.sim_start
    if parser.has_section("service"):
        section = parser["service"]
        if "listen" in section:
            host, port = _parse_listen(section["listen"])
        if "storage" in section:
            storage = base / section["storage"]
        clock_kind = section.get("clock", clock_kind)
        if clock_kind not in ("wall", "simulated"):
            raise ConfigError(f"clock must be wall or simulated, got {clock_kind!r}")
        if "sim_start" in section:
            try:
                sim_start = parse_rfc3339(section["sim_start"])
            except ValueError as exc:
                raise ConfigError(f"bad sim_start: {exc}")
    if clock_kind == "simulated" and sim_start is None:
        raise ConfigError("simulated clock needs sim_start")

    deadline, max_in_flight, script = defaults.deadline, defaults.max_in_flight, None
    if parser.has_section("fetch"):
        section = parser["fetch"]
        try:
            deadline = section.getfloat("deadline_seconds", deadline)
            max_in_flight = section.getint("max_in_flight", max_in_flight)
        except ValueError as exc:
            raise ConfigError(f"bad [fetch] value: {exc}")
        if deadline <= 0:
            raise ConfigError("deadline_seconds must be positive")
        if max_in_flight < 1:
            raise ConfigError("max_in_flight must be at least 1")
        if "script" in section:
            script = base / section["script"]
            if not script.exists():
                raise ConfigError(f"scenario script {script} not found")

    minor, wrong = defaults.minor_threshold, defaults.wrong_threshold
    if parser.has_section("thresholds"):
        section = parser["thresholds"]
        try:
            minor = section.getfloat("minor", minor)
            wrong = section.getfloat("wrong_content", wrong)
        except ValueError as exc:
            raise ConfigError(f"bad [thresholds] value: {exc}")
    if not 0.0 < minor < 1.0 or not 0.0 < wrong < 1.0:
        raise ConfigError("thresholds must lie strictly between 0 and 1")
    if wrong >= minor:
        raise ConfigError("wrong_content threshold must be below the minor threshold")

    members = []
    for name in parser.sections():
        if not name.startswith("member:"):
            continue
        member_id = name.split(":", 1)[1]
        section = parser[name]
        try:
            kind = MemberKind(section.get("kind", ""))
        except ValueError:
            raise ConfigError(f"member {member_id} needs kind archive, cache, or search")
        try:
            lag = timedelta(days=section.getfloat("lag_days", 0.0))
        except ValueError as exc:
            raise ConfigError(f"bad lag_days for member {member_id}: {exc}")
        members.append(
            MemberConfig(
                member_id=member_id,
                kind=kind,
                lag=lag,
                endpoint=section.get("endpoint", ""),
                lookup=section.getboolean("lookup", False),
            )
        )
    members = tuple(members) if members else defaults.members

    if ENV_LISTEN in env:
        host, port = _parse_listen(env[ENV_LISTEN])
    if ENV_STORAGE in env:
        storage = Path(env[ENV_STORAGE])

    return ServiceConfig(
        host=host,
        port=port,
        storage=storage,
        clock_kind=clock_kind,
        sim_start=sim_start,
        deadline=deadline,
        max_in_flight=max_in_flight,
        script=script,
        minor_threshold=minor,
        wrong_threshold=wrong,
        members=members,
    )


@dataclass
class Runtime:
    config: ServiceConfig
    clock: object
    fetcher: object
    registry: WIRegistry
    curator: Curator


def build_runtime(config: ServiceConfig) -> Runtime:
    """Wire clock, fetcher, members, and curator from one config.

    Members are always the in-memory simulation; descriptors carry the
    endpoint an external adapter would use.  The fetcher touches the real
    web only under the wall clock with no scenario script.
    """
    if config.clock_kind == "simulated":
        clock = SimulatedClock(config.sim_start)
    else:
        clock = WallClock()
    if config.script is not None:
        fetcher = load_script(config.script, clock)
    elif config.clock_kind == "simulated":
        fetcher = SimulatedWeb(clock)
    else:
        fetcher = HttpFetcher(clock)
    registry = WIRegistry(clock)
    for member in config.members:
        registry.add(SimulatedMember(member.descriptor(), clock))
    curator = Curator(
        config.storage,
        registry,
        fetcher,
        clock=clock,
        minor_threshold=config.minor_threshold,
        wrong_threshold=config.wrong_threshold,
        deadline=config.deadline,
        max_in_flight=config.max_in_flight,
    )
    return Runtime(config=config, clock=clock, fetcher=fetcher, registry=registry, curator=curator)
