"""Command-line interface mirroring the HTTP API.

Output is line-oriented and tab-separated so scripts can cut fields.
Exit codes: 0 success, 1 domain error (message on stderr), 2 usage error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from remcurator.clock import format_rfc3339, parse_rfc3339
from remcurator.config import ConfigError, build_runtime, load_config
from remcurator.curator import CuratorError, DecisionKind
from remcurator.ore import RemError, parse_rem, validate
from remcurator.revisions import RevisionError

DEFAULT_ACTOR = "anonymous"


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="remcurator",
        description="Archive Resource Maps into the web infrastructure and curate their drift.",
    )
    parser.add_argument("--config", help="path to an INI config file")
    parser.add_argument("--storage", help="storage directory, overriding the config")
    parser.add_argument("--clock", choices=["wall", "simulated"], help="clock mode override")
    parser.add_argument("--now", help="simulated clock start (RFC 3339); implies --clock simulated")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a Resource Map file against the model rules")
    p.add_argument("file")

    p = sub.add_parser("register", help="bring a Resource Map under curation")
    p.add_argument("source", help="Resource Map URI, or a path to an Atom file")
    p.add_argument("--actor", default=DEFAULT_ACTOR)

    p = sub.add_parser("check", help="open a session and print every resource's status")
    p.add_argument("key")
    p.add_argument("--actor", default=DEFAULT_ACTOR)

    p = sub.add_parser("aid", help="show relocation help for a flagged resource")
    p.add_argument("session")
    p.add_argument("entry")

    p = sub.add_parser("decide", help="resolve a flagged resource")
    p.add_argument("session")
    p.add_argument("entry")
    p.add_argument("kind", choices=[k.value for k in DecisionKind])
    p.add_argument("new_uri", nargs="?", help="target URI (relocate only)")
    p.add_argument("--actor", default=DEFAULT_ACTOR)

    p = sub.add_parser("finalize", help="close a session, committing its changes")
    p.add_argument("session")
    p.add_argument("--actor", default=DEFAULT_ACTOR)

    p = sub.add_parser("history", help="list a Resource Map's revisions")
    p.add_argument("key")

    p = sub.add_parser("rollback", help="make an earlier revision current again")
    p.add_argument("key")
    p.add_argument("target", type=int)
    p.add_argument("--actor", default=DEFAULT_ACTOR)

    p = sub.add_parser("timeline", help="print the per-resource change timeline")
    p.add_argument("key")
    p.add_argument("--json", action="store_true", help="emit the export document instead of lines")

    sub.add_parser("serve", help="run the HTTP service")
    return parser


def _runtime(args):
    config = load_config(args.config)
    if args.storage:
        config = replace(config, storage=Path(args.storage))
    if args.now:
        config = replace(config, clock_kind="simulated", sim_start=parse_rfc3339(args.now))
    elif args.clock:
        config = replace(config, clock_kind=args.clock)
    if config.clock_kind == "simulated" and config.sim_start is None:
        raise ConfigError("simulated clock needs --now or sim_start in the config")
    return build_runtime(config)


def _fmt(value) -> str:
    if value is None:
        return "-"
    if isinstance(value, float):
        return f"{value:.4f}"
    return str(value)


def _cmd_validate(args, out) -> int:
    raw = Path(args.file).read_bytes()
    doc = parse_rem(raw)
    problems = validate(doc)
    if problems:
        for problem in problems:
            print(problem, file=sys.stderr)
        return 1
    print("valid", file=out)
    return 0


def _cmd_register(args, out) -> int:
    runtime = _runtime(args)
    path = Path(args.source)
    source: "str | bytes" = path.read_bytes() if path.exists() else args.source
    result = runtime.curator.register(source, args.actor)
    print(f"registered\t{result.rem_key}\tr{result.revision.rev_id}", file=out)
    for entry_id, outcome in result.ar_results.items():
        print(f"{entry_id}\t{outcome}", file=out)
    return 0


def _cmd_check(args, out) -> int:
    runtime = _runtime(args)
    session = runtime.curator.open_session(args.key, args.actor)
    flag = "\trem-missing" if session.rem_missing else ""
    print(f"session\t{session.session_id}{flag}", file=out)
    for change in session.external_changes:
        print(f"external\t{change.kind.value}\t{_fmt(change.entry_id)}", file=out)
    for status in session.statuses:
        print(
            "\t".join(
                [
                    status.entry_id,
                    status.state.value,
                    _fmt(status.reason.value if status.reason else None),
                    _fmt(status.similarity),
                    status.ar_uri,
                ]
            ),
            file=out,
        )
    return 0


def _cmd_aid(args, out) -> int:
    runtime = _runtime(args)
    session = runtime.curator.load_session(args.session)
    aid = runtime.curator.attention_aid(session, args.entry)
    print(f"entry\t{aid.entry_id}\t{aid.ar_uri}", file=out)
    print(f"title\t{_fmt(aid.title or None)}", file=out)
    last = format_rfc3339(aid.last_known_at) if aid.last_known_at else None
    print(f"last-known\t{_fmt(last)}", file=out)
    print(f"signature\t{_fmt(' '.join(aid.signature) or None)}", file=out)
    for query in aid.queries:
        print(f"query\t{query}", file=out)
    for copy in aid.wi_copies:
        print(
            f"copy\t{copy.member_id}\t{format_rfc3339(copy.captured_at)}\t{copy.archived_uri}",
            file=out,
        )
    return 0


def _cmd_decide(args, out) -> int:
    runtime = _runtime(args)
    session = runtime.curator.load_session(args.session)
    runtime.curator.apply_decision(
        session, args.entry, DecisionKind(args.kind), args.actor, new_uri=args.new_uri
    )
    status = session.status(args.entry)
    print(f"{args.entry}\t{status.state.value}", file=out)
    return 0


def _cmd_finalize(args, out) -> int:
    runtime = _runtime(args)
    session = runtime.curator.load_session(args.session)
    revision = runtime.curator.finalize(session, args.actor)
    print(f"r{revision.rev_id}", file=out)
    return 0


def _cmd_history(args, out) -> int:
    runtime = _runtime(args)
    out.write(runtime.curator.store.export_changelog(args.key))
    return 0


def _cmd_rollback(args, out) -> int:
    runtime = _runtime(args)
    revision = runtime.curator.rollback(args.key, args.target, args.actor)
    print(f"r{revision.rev_id}", file=out)
    return 0


def _cmd_timeline(args, out) -> int:
    import json

    runtime = _runtime(args)
    if args.json:
        print(json.dumps(runtime.curator.export_timeline(args.key), indent=2), file=out)
        return 0
    for event in runtime.curator.timeline(args.key):
        data = event.to_dict()
        print(
            "\t".join([data["entry_id"], data["at"], data["kind"], data["label"], data["ar_uri"]]),
            file=out,
        )
    return 0


def _cmd_serve(args, out) -> int:
    from remcurator.service import serve

    config = load_config(args.config)
    if args.storage:
        config = replace(config, storage=Path(args.storage))
    if args.now:
        config = replace(config, clock_kind="simulated", sim_start=parse_rfc3339(args.now))
    elif args.clock:
        config = replace(config, clock_kind=args.clock)
    serve(config)
    return 0


_COMMANDS = {
    "validate": _cmd_validate,
    "register": _cmd_register,
    "check": _cmd_check,
    "aid": _cmd_aid,
    "decide": _cmd_decide,
    "finalize": _cmd_finalize,
    "history": _cmd_history,
    "rollback": _cmd_rollback,
    "timeline": _cmd_timeline,
    "serve": _cmd_serve,
}


def main(argv=None, out=sys.stdout) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args, out)
    except (CuratorError, RevisionError, RemError, ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
