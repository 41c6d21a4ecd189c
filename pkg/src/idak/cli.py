"""Command-line front end: key management, a file-driven exchange, the
cost benchmark, the scenario runner, and the self-reduction demo.

Exit codes: 0 success, 1 data error, 2 usage error, 3 assertion failure.
"""

import argparse
import dataclasses
import json
import random
import statistics
import sys
import time
from importlib import resources
from pathlib import Path

from idak import keystore
from idak.bilinear import (
    encode_point,
    hash_to_group,
    instance_generate,
    scalar_exp,
    pairing,
)
from idak.errors import (
    DegenerateExponentError,
    IdakError,
    InvalidFlowError,
    ScenarioError,
)
from idak.protocol import (
    DEFAULT_KDF_TAG,
    GENERATOR_ID,
    MasterSecret,
    PiVariant,
    SystemParams,
    decode_flow,
    derive,
    encode_flow,
    extract,
    initiate,
    parse_strategy,
    pfs_respond,
    pfs_session_key,
    pfs_verify_extra,
    session_key,
    setup,
    validate_flow_point,
)
from idak.selfreduction import MockCbdhOracle, amplify, make_instance
from idak.sessions import MODES, run_scenario

EXIT_OK = 0
EXIT_DATA = 1
EXIT_USAGE = 2
EXIT_ASSERT = 3

BANNER = (
    "note: parameters this small are for protocol study only and offer no security"
)

# expected online cost of each derivation strategy:
# (pairings, exp_g, mul_g, exp_gt), pi-length exponents weighted 0.5
EXPECTED_COSTS = {
    "c1-nopre": (1, 2.5, 1, 0),
    "c2-nopre": (1, 1.5, 1, 1),
    "c1-pre": (1, 1.0, 2, 0),
    "c2-pre": (1, 0.5, 1, 1),
}

BENCH_ORDER = ("c1-nopre", "c2-nopre", "c1-pre", "c2-pre")

PI_CHOICES = tuple(variant.value for variant in PiVariant)
STRATEGY_CHOICES = tuple(EXPECTED_COSTS)


def _k_bits(text):
    try:
        value = int(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from exc
    if not 3 <= value <= 512:
        raise argparse.ArgumentTypeError("k_bits must lie in [3, 512]")
    return value


def _identity(text):
    if not text:
        raise argparse.ArgumentTypeError("identity must not be empty")
    return text


def _rng(seed, label):
    if seed is None:
        return random.Random()
    return random.Random(f"idak-cli-{label}:{seed}".encode("utf-8"))


def _emit(args, report):
    if not args.quiet:
        print(json.dumps(report, sort_keys=True))


def _system_params(args):
    group = keystore.load_group(args.params)
    return SystemParams(
        group=group,
        g=hash_to_group(group, GENERATOR_ID),
        pi_variant=PiVariant(args.pi),
        kdf_tag=DEFAULT_KDF_TAG,
    )


def _fail(label, detail):
    print(f"error: {label}: {detail}", file=sys.stderr)
    return EXIT_DATA


def _read_flow(params, path):
    """Decode a wire flow, separating framing errors from point rejection."""
    data = Path(path).read_bytes()
    role, ident, msg, extra = decode_flow(params, data)
    try:
        validate_flow_point(params, msg.r)
        if extra is not None:
            validate_flow_point(params, extra)
    except InvalidFlowError as exc:
        raise _RejectedPoint(str(exc)) from exc
    return role, ident, msg, extra


class _RejectedPoint(Exception):
    pass


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_setup(args):
    params, msk = setup(args.k_bits, seed=args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    params_path = out / "params.key"
    master_path = out / "master.key"
    keystore.save_group(params_path, params.group)
    keystore.save_master(master_path, params.group, msk.alpha)
    if not args.quiet:
        print(BANNER, file=sys.stderr)
    group = params.group
    _emit(
        args,
        {
            "params": str(params_path),
            "master": str(master_path),
            "p": group.p,
            "q": group.q,
            "h": group.h,
            "k_bits": group.k_bits,
        },
    )
    return EXIT_OK


def cmd_extract(args):
    params = _system_params(args)
    alpha = keystore.load_master(args.master, params.group)
    key = extract(params, MasterSecret(alpha=alpha), args.identity)
    keystore.save_identity(args.out, params.group, key)
    public = encode_point(params.group, key.g_id).hex()
    _emit(args, {"identity": args.identity, "public": public, "file": args.out})
    return EXIT_OK


def cmd_verify_key(args):
    params = _system_params(args)
    alpha = keystore.load_master(args.master, params.group)
    key = keystore.load_identity(args.key_file, params.group)
    group = params.group
    master_point = scalar_exp(group, params.g, alpha)
    ok = pairing(group, key.d_id, params.g) == pairing(group, key.g_id, master_point)
    _emit(args, {"identity": key.identity.decode("utf-8", "replace"), "ok": ok})
    return EXIT_OK if ok else EXIT_DATA


def cmd_initiate(args):
    params = _system_params(args)
    own = keystore.load_identity(args.key, params.group)
    x, msg = initiate(params, own, _rng(args.seed, "initiate"))
    Path(args.flow_out).write_bytes(encode_flow(params, "initiator", own.identity, msg))
    keystore.save_state(args.state_out, params.group, args.peer.encode("utf-8"), x, msg)
    _emit(args, {"flow": args.flow_out, "state": args.state_out})
    return EXIT_OK


def cmd_respond(args):
    params = _system_params(args)
    own = keystore.load_identity(args.key, params.group)
    try:
        role, peer_ident, peer_msg, peer_extra = _read_flow(params, args.flow_in)
    except InvalidFlowError as exc:
        return _fail("invalid-flow", exc)
    except _RejectedPoint as exc:
        return _fail("rejected-point", exc)
    if role != "initiator":
        return _fail("invalid-flow", "expected an initiator flow")
    if peer_extra is not None:
        return _fail("invalid-flow", "initiator flows carry no extra point")
    rng = _rng(args.seed, "respond")
    if args.pfs:
        y, msg, extra = pfs_respond(params, own, peer_ident, rng)
    else:
        y, msg = initiate(params, own, rng)
        extra = None
    strategy = parse_strategy(args.strategy)
    try:
        sk, counts = derive(
            params, own, y, msg, peer_ident, peer_msg, "responder", strategy
        )
    except DegenerateExponentError as exc:
        return _fail("degenerate-exponent", f"{exc}; responder rejects this session")
    except InvalidFlowError as exc:
        return _fail("rejected-point", exc)
    if args.pfs:
        dh = scalar_exp(params.group, peer_msg.r, y)
        key = pfs_session_key(params, sk, dh)
    else:
        key = session_key(params, sk, peer_ident, own.identity, peer_msg, msg)
    Path(args.flow_out).write_bytes(
        encode_flow(params, "responder", own.identity, msg, extra)
    )
    keystore.save_session(args.key_out, key)
    _emit(
        args,
        {
            "flow": args.flow_out,
            "key": args.key_out,
            "counts": dataclasses.asdict(counts),
        },
    )
    return EXIT_OK


def cmd_finalize(args):
    params = _system_params(args)
    own = keystore.load_identity(args.key, params.group)
    peer_id, x, own_msg = keystore.load_state(args.state, params.group)
    try:
        role, sender_ident, peer_msg, extra = _read_flow(params, args.flow_in)
    except InvalidFlowError as exc:
        return _fail("invalid-flow", exc)
    except _RejectedPoint as exc:
        return _fail("rejected-point", exc)
    if role != "responder":
        return _fail("invalid-flow", "expected a responder flow")
    if sender_ident != peer_id:
        return _fail(
            "invalid-flow",
            f"flow names {sender_ident!r}, session was opened with {peer_id!r}",
        )
    if args.pfs and extra is None:
        return _fail("invalid-flow", "flow carries no extra point; responder ran without --pfs")
    if not args.pfs and extra is not None:
        return _fail("invalid-flow", "flow carries an extra point; rerun with --pfs")
    if args.pfs and not pfs_verify_extra(params, own, peer_id, peer_msg, extra):
        return _fail("invalid-flow", "extra point fails the pairing check")
    strategy = parse_strategy(args.strategy)
    try:
        sk, counts = derive(
            params, own, x, own_msg, peer_id, peer_msg, "initiator", strategy
        )
    except DegenerateExponentError as exc:
        return _fail("degenerate-exponent", f"{exc}; rerun initiate with a fresh seed")
    except InvalidFlowError as exc:
        return _fail("rejected-point", exc)
    if args.pfs:
        dh = scalar_exp(params.group, extra, x)
        key = pfs_session_key(params, sk, dh)
    else:
        key = session_key(params, sk, own.identity, peer_id, own_msg, peer_msg)
    keystore.save_session(args.key_out, key)
    _emit(args, {"key": args.key_out, "counts": dataclasses.asdict(counts)})
    return EXIT_OK


def cmd_bench(args):
    params = _system_params(args)
    rng = _rng(args.seed or "bench", "bench")
    msk = MasterSecret(alpha=1 + rng.randrange(params.group.q - 1))
    alice = extract(params, msk, "bench-initiator")
    bob = extract(params, msk, "bench-responder")
    rows = []
    mismatches = []
    for label in BENCH_ORDER:
        strategy = parse_strategy(label)
        counts, times = None, []
        for _ in range(args.trials):
            while True:
                x, msg_a = initiate(params, alice, rng)
                y, msg_b = initiate(params, bob, rng)
                started = time.perf_counter()
                try:
                    _, counts = derive(
                        params, alice, x, msg_a, "bench-responder", msg_b,
                        "initiator", strategy,
                    )
                except DegenerateExponentError:
                    continue  # redraw both ephemerals
                times.append(time.perf_counter() - started)
                break
        observed = (counts.pairings, counts.exp_g, counts.mul_g, counts.exp_gt)
        if observed != EXPECTED_COSTS[label]:
            mismatches.append((label, observed))
        rows.append((label, observed, statistics.median(times)))
    if not args.quiet:
        print("strategy\tpairings\texp_g\tmul_g\texp_gt\tmedian_ms")
        for label, (pairings, exp_g, mul_g, exp_gt), median in rows:
            print(
                f"{label}\t{pairings}\t{exp_g}\t{mul_g}\t{exp_gt}\t{median * 1000:.3f}"
            )
    if mismatches:
        for label, observed in mismatches:
            print(
                f"error: cost mismatch for {label}: observed {observed}, "
                f"expected {EXPECTED_COSTS[label]}",
                file=sys.stderr,
            )
        return EXIT_ASSERT
    return EXIT_OK


def bundled_scenarios():
    root = resources.files("idak") / "scenarios"
    return sorted(entry.name for entry in root.iterdir() if entry.name.endswith(".jsonl"))


def _scenario_lines(name):
    path = Path(name)
    if path.exists():
        return path.read_text().splitlines()
    stem = name if name.endswith(".jsonl") else f"{name}.jsonl"
    resource = resources.files("idak") / "scenarios" / stem
    if resource.is_file():
        return resource.read_text().splitlines()
    raise FileNotFoundError(f"no scenario file or bundled scenario named {name!r}")


def cmd_scenario(args):
    if args.list:
        for name in bundled_scenarios():
            print(name)
        return EXIT_OK
    if args.file is None:
        print("error: usage: a scenario file is required unless --list is given", file=sys.stderr)
        return EXIT_USAGE
    lines = _scenario_lines(args.file)
    report = run_scenario(lines, k_bits=args.k_bits, seed=args.seed, mode=args.mode)
    _emit(args, report)
    if not report["ok"]:
        for failure in report["failures"]:
            print(
                f"error: scenario line {failure['line']}: {failure['reason']}",
                file=sys.stderr,
            )
        return EXIT_ASSERT
    return EXIT_OK


def cmd_reduce(args):
    group = instance_generate(args.k_bits, args.seed)
    g = hash_to_group(group, GENERATOR_ID)
    rng = _rng(args.seed, "reduce")
    oracle = MockCbdhOracle(group, g, args.delta, random.Random(rng.getrandbits(64)))
    successes = 0
    for _ in range(args.trials):
        inst, truth = make_instance(group, g, rng)
        if amplify(group, oracle, inst, args.n, rng) == truth:
            successes += 1
    _emit(
        args,
        {
            "delta": args.delta,
            "n": args.n,
            "trials": args.trials,
            "success_rate": successes / args.trials,
            "params": {"p": group.p, "q": group.q, "h": group.h},
        },
    )
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument plumbing
# ---------------------------------------------------------------------------


def build_parser():
    parser = argparse.ArgumentParser(
        prog="idak",
        description="identity-based authenticated key agreement over a toy pairing",
    )

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--quiet", action="store_true", help="suppress reports")

    with_params = argparse.ArgumentParser(add_help=False)
    with_params.add_argument("--params", required=True, help="parameters file")
    with_params.add_argument(
        "--pi", choices=PI_CHOICES, default=PiVariant.HASH_HALF.value,
        help="flow-compression variant",
    )

    exchange = argparse.ArgumentParser(add_help=False)
    exchange.add_argument(
        "--strategy", choices=STRATEGY_CHOICES, default="c1-nopre",
        help="derivation strategy",
    )
    exchange.add_argument("--pfs", action="store_true", help="forward-secure variant")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("setup", parents=[common], help="generate parameters and master key")
    p.add_argument("--k-bits", type=_k_bits, required=True, help="subgroup order size in bits")
    p.add_argument("--seed", default=None, help="deterministic generation seed")
    p.add_argument("--out", default=".", help="output directory")
    p.set_defaults(func=cmd_setup)

    p = sub.add_parser("extract", parents=[common, with_params], help="issue an identity key")
    p.add_argument("identity", type=_identity, help="principal name")
    p.add_argument("--master", required=True, help="master key file")
    p.add_argument("--out", required=True, help="identity key file to write")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser(
        "verify-key", parents=[common, with_params],
        help="check an identity key against the master key by pairing",
    )
    p.add_argument("key_file", help="identity key file")
    p.add_argument("--master", required=True, help="master key file")
    p.set_defaults(func=cmd_verify_key)

    p = sub.add_parser("initiate", parents=[common, with_params], help="open a session")
    p.add_argument("--key", required=True, help="own identity key file")
    p.add_argument("--peer", type=_identity, required=True, help="responder identity")
    p.add_argument("--flow-out", required=True, help="flow file to write")
    p.add_argument("--state-out", required=True, help="pending-session file to write")
    p.add_argument("--seed", default=None, help="ephemeral seed")
    p.set_defaults(func=cmd_initiate)

    p = sub.add_parser(
        "respond", parents=[common, with_params, exchange],
        help="answer a flow and derive the key",
    )
    p.add_argument("--key", required=True, help="own identity key file")
    p.add_argument("--flow-in", required=True, help="initiator flow file")
    p.add_argument("--flow-out", required=True, help="reply flow file to write")
    p.add_argument("--key-out", required=True, help="session key file to write")
    p.add_argument("--seed", default=None, help="ephemeral seed")
    p.set_defaults(func=cmd_respond)

    p = sub.add_parser(
        "finalize", parents=[common, with_params, exchange],
        help="absorb the reply and derive the key",
    )
    p.add_argument("--key", required=True, help="own identity key file")
    p.add_argument("--state", required=True, help="pending-session file from initiate")
    p.add_argument("--flow-in", required=True, help="responder flow file")
    p.add_argument("--key-out", required=True, help="session key file to write")
    p.set_defaults(func=cmd_finalize)

    p = sub.add_parser(
        "bench", parents=[common, with_params],
        help="measure derivation cost per strategy",
    )
    p.add_argument("--trials", type=int, default=5, help="timed runs per strategy")
    p.add_argument("--seed", default=None, help="session seed")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("scenario", parents=[common], help="run a query script")
    p.add_argument("file", nargs="?", help="scenario file or bundled name")
    p.add_argument("--list", action="store_true", help="list bundled scenarios")
    p.add_argument("--seed", default="scenario", help="world seed")
    p.add_argument("--mode", choices=MODES, default="br", help="freshness mode")
    p.add_argument("--k-bits", type=_k_bits, default=16, help="parameter size")
    p.set_defaults(func=cmd_scenario)

    p = sub.add_parser(
        "reduce", parents=[common],
        help="amplify a faulty oracle over blinded instances",
    )
    p.add_argument("--delta", type=float, default=1.0, help="oracle reliability")
    p.add_argument("--n", type=int, default=1, help="blinded queries per instance")
    p.add_argument("--trials", type=int, default=10, help="instances to solve")
    p.add_argument("--k-bits", type=_k_bits, default=16, help="parameter size")
    p.add_argument("--seed", default="reduce", help="experiment seed")
    p.set_defaults(func=cmd_reduce)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ScenarioError as exc:
        print(f"error: scenario: {exc}", file=sys.stderr)
        return EXIT_DATA
    except IdakError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
