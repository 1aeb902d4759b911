"""Command-line front end: issue cards, run the server, log in, change
passwords, and run the attack demonstrations.

stdout carries machine-readable JSON only; every human-facing diagnostic goes
to stderr. Exit codes: 0 success/accepted, 1 rejected (login) or vulnerability
not confirmed (attack), 2 bad input or config, 3 unwritable output, 4 bind
failure, 5 connection failure.
"""

from __future__ import annotations

import argparse
import getpass
import json
import sys
import time

from authlab.attack import run_cloned_card_attack, run_random_password_attack
from authlab.clock import Clock, clock_from_env
from authlab.protocol import AuthDecision, change_password, issue_card
from authlab.storage import (
    CardFileError,
    ConfigError,
    StorageError,
    load_card,
    load_server_config,
    parse_address,
    save_card,
)
from authlab.wire import WireError, client_login, serve

EXIT_OK = 0
EXIT_REJECTED = 1
EXIT_BAD_INPUT = 2
EXIT_UNWRITABLE = 3
EXIT_BIND_FAILURE = 4
EXIT_CONNECTION_FAILURE = 5


def _diag(message: str) -> None:
    print(f"authlab: {message}", file=sys.stderr)


def _emit(obj: dict) -> None:
    print(json.dumps(obj), flush=True)


def _password(value: str | None, prompt: str) -> bytes:
    if value is None:
        value = getpass.getpass(prompt)
    return value.encode("utf-8")


def _decision_json(decision: AuthDecision) -> dict:
    return {
        "accepted": decision.accepted,
        "reason": decision.reason.value,
        "recovered_hpw": decision.recovered_hpw.hex() if decision.recovered_hpw else None,
    }


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def cmd_register(args: argparse.Namespace, clock: Clock) -> int:
    try:
        config = load_server_config(args.config)
    except ConfigError as exc:
        _diag(f"bad server config: {exc}")
        return EXIT_BAD_INPUT
    pw = _password(args.password, "Password for new user: ")
    card = issue_card(pw, config.secrets, config.hash_id)
    try:
        save_card(args.out, card)
    except OSError as exc:
        _diag(f"cannot write card file: {exc}")
        return EXIT_UNWRITABLE
    _emit({"card": str(args.out)})
    return EXIT_OK


def cmd_serve(args: argparse.Namespace, clock: Clock) -> int:
    try:
        config = load_server_config(args.config)
    except ConfigError as exc:
        _diag(f"bad server config: {exc}")
        return EXIT_BAD_INPUT

    audit_file = None
    if config.audit_path is not None:
        try:
            audit_file = open(config.audit_path, "a", encoding="utf-8")
        except OSError as exc:
            _diag(f"cannot open audit log: {exc}")
            return EXIT_BAD_INPUT
    try:
        handle = serve(
            config.secrets,
            config.bind_address,
            config.window_secs,
            clock,
            skew_secs=config.skew_secs,
            hash_id=config.hash_id,
            audit_stream=audit_file,
        )
    except OSError as exc:
        _diag(f"cannot bind {'%s:%d' % config.bind_address}: {exc}")
        if audit_file:
            audit_file.close()
        return EXIT_BIND_FAILURE

    _emit({"listening": "%s:%d" % handle.address})
    try:
        while True:
            time.sleep(1)
    except KeyboardInterrupt:
        _diag("interrupt received, shutting down")
    finally:
        handle.close()
        if audit_file:
            audit_file.close()
    return EXIT_OK


def cmd_login(args: argparse.Namespace, clock: Clock) -> int:
    try:
        card = load_card(args.card)
    except CardFileError as exc:
        _diag(f"bad card file: {exc}")
        return EXIT_BAD_INPUT
    try:
        address = parse_address(args.server)
    except ValueError as exc:
        _diag(str(exc))
        return EXIT_BAD_INPUT
    pw = _password(args.password, "Password: ")
    try:
        decision = client_login(address, card, pw, clock)
    except WireError as exc:
        _diag(f"login failed: {exc}")
        return EXIT_CONNECTION_FAILURE
    _emit(_decision_json(decision))
    return EXIT_OK if decision.accepted else EXIT_REJECTED


def cmd_change_password(args: argparse.Namespace, clock: Clock) -> int:
    try:
        card = load_card(args.card)
    except CardFileError as exc:
        _diag(f"bad card file: {exc}")
        return EXIT_BAD_INPUT
    old_pw = _password(args.old_password, "Current password: ")
    new_pw = _password(args.new_password, "New password: ")
    updated = change_password(card, old_pw, new_pw)
    try:
        save_card(args.card, updated)
    except OSError as exc:
        _diag(f"cannot rewrite card file: {exc}")
        return EXIT_UNWRITABLE
    _emit({"card": str(args.card)})
    return EXIT_OK


def cmd_attack(args: argparse.Namespace, clock: Clock) -> int:
    try:
        card = load_card(args.card)
        config = load_server_config(args.config)
    except StorageError as exc:
        _diag(str(exc))
        return EXIT_BAD_INPUT

    submit = None
    if args.remote is not None:
        try:
            address = parse_address(args.remote) if args.remote else config.bind_address
        except ValueError as exc:
            _diag(str(exc))
            return EXIT_BAD_INPUT

        def submit(c, pw, t):
            return client_login(address, c, pw, clock)

    runner = {
        "random-password": run_random_password_attack,
        "cloned-card": run_cloned_card_attack,
    }[args.scenario]
    try:
        report = runner(
            card,
            config.secrets,
            args.trials,
            args.seed,
            clock,
            window_secs=config.window_secs,
            submit=submit,
        )
    except WireError as exc:
        _diag(f"remote attack failed: {exc}")
        return EXIT_BAD_INPUT
    print(report.to_json(), flush=True)
    return EXIT_OK if report.acceptance_rate == 1.0 else EXIT_REJECTED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="authlab",
        description="Dynamic-ID smartcard login lab: protocol, server, and attack demos.",
        epilog="Set AUTHLAB_FAKE_TIME=<epoch seconds> to pin the clock for reproducible runs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    pw_help = "password value (test convenience; omits the prompt but lands in shell history)"

    p = sub.add_parser("register", help="issue a new card file for a user")
    p.add_argument("--config", required=True, help="server config JSON path")
    p.add_argument("--out", required=True, help="card file path to write")
    p.add_argument("--password", help=pw_help)
    p.set_defaults(func=cmd_register)

    p = sub.add_parser("serve", help="run the authentication server until interrupted")
    p.add_argument("--config", required=True, help="server config JSON path")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("login", help="log in against a running server")
    p.add_argument("--card", required=True, help="card file path")
    p.add_argument("--server", required=True, help="server address host:port")
    p.add_argument("--password", help=pw_help)
    p.set_defaults(func=cmd_login)

    p = sub.add_parser("change-password", help="rewrite the card for a new password")
    p.add_argument("--card", required=True, help="card file path")
    p.add_argument("--old-password", help=pw_help)
    p.add_argument("--new-password", help=pw_help)
    p.set_defaults(func=cmd_change_password)

    p = sub.add_parser("attack", help="run an attack scenario and report the acceptance rate")
    p.add_argument("--card", required=True, help="card file path")
    p.add_argument("--config", required=True, help="server config JSON path")
    p.add_argument(
        "--scenario",
        choices=["random-password", "cloned-card"],
        default="random-password",
    )
    p.add_argument("--trials", type=_positive_int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument(
        "--remote",
        nargs="?",
        const="",
        default=None,
        metavar="HOST:PORT",
        help="submit trials over the network instead of in-process "
        "(bare flag targets the config's bind_address)",
    )
    p.set_defaults(func=cmd_attack)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        clock = clock_from_env()
    except ValueError as exc:
        _diag(str(exc))
        return EXIT_BAD_INPUT
    return args.func(args, clock)


if __name__ == "__main__":
    sys.exit(main())
