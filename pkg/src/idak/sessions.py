"""Session-oracle world for driving the key agreement under attack.

The world owns the authority state and a set of principals.  An adversary
schedules everything: it activates oracles (send), steals session keys
(reveal), long-term keys (corrupt), or arbitrary identity keys (extract),
and finally asks one test query whose answer is either the real session
key or a key derived from a uniform GT element.  An oracle is a single
party's view of a single protocol run; matching oracles are the two ends
of one honest exchange.

Freshness is what makes a test query meaningful.  In "br" mode a corrupt
query on either endpoint identity poisons the oracle no matter when it
happened; in "wpfsbr" mode only corruption before the oracle completed
does, which is exactly the weak-forward-secrecy relaxation.  Extract
queries on either endpoint identity and reveal queries on the oracle or
on a matching oracle always poison it.

A scenario file (JSON lines) scripts one adversary schedule together
with embedded assertions, so attack transcripts can live as fixtures.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field

from .bilinear import decode_point, encode_point, gt_exp, pairing, random_scalar
from .errors import (
    InvalidFlowError,
    MalformedElementError,
    NoKeyError,
    NoSuchPrincipalError,
    NotTestableError,
    ScenarioError,
    StaleOracleError,
    TestRefusedError,
)
from .protocol import (
    FlowMessage,
    IdentityKey,
    MasterSecret,
    PiVariant,
    SessionKey,
    SharedSecret,
    SystemParams,
    derive,
    extract,
    initiate,
    session_key,
    setup,
    validate_flow_point,
)

MODES = ("br", "wpfsbr")


@dataclass
class SessionOracle:
    """One party's view of one protocol run: oracle (owner, peer, index)."""

    owner: str
    peer: str
    index: int
    role: str | None = None
    transcript: list = field(default_factory=list)  # ("out" | "in", FlowMessage)
    ephemeral: int | None = None
    own_msg: FlowMessage | None = None
    key: SessionKey | None = None
    binding: tuple | None = None  # (init_id, resp_id, init_msg, resp_msg)
    completed: bool = False
    completed_at: int | None = None
    revealed: bool = False
    aborted: bool = False

    def name(self) -> str:
        return f"({self.owner},{self.peer})#{self.index}"


class World:
    """Authority state, principals, oracles, and the adversary queries."""

    def __init__(
        self,
        params: SystemParams,
        msk: MasterSecret,
        mode: str = "br",
        rng: random.Random | None = None,
    ):
        if mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
        self.params = params
        self.msk = msk
        self.mode = mode
        self.rng = rng if rng is not None else random.Random()
        self.principals: dict[str, IdentityKey] = {}
        self.oracles: list[SessionOracle] = []
        self.corrupted_at: dict[str, int] = {}
        self.extracted: set[str] = set()
        self.clock = 0

    # -- state management ---------------------------------------------------

    def add_principal(self, identity: str) -> IdentityKey:
        if identity not in self.principals:
            self.principals[identity] = extract(self.params, self.msk, identity)
        return self.principals[identity]

    def new_oracle(self, owner: str, peer: str) -> SessionOracle:
        """Fresh oracle for owner talking to peer; the world assigns the index."""
        self.add_principal(owner)
        self.add_principal(peer)
        index = 1 + sum(1 for o in self.oracles if (o.owner, o.peer) == (owner, peer))
        oracle = SessionOracle(owner=owner, peer=peer, index=index)
        self.oracles.append(oracle)
        return oracle

    # -- adversary queries --------------------------------------------------

    def send(self, oracle: SessionOracle, flow) -> FlowMessage | None:
        """Deliver a flow (or None to activate an initiator).

        A responder completes on its first activation and emits its flow.
        An initiator emits its flow on activation and completes when the
        reply arrives, emitting nothing.  Bad flows abort the oracle.
        """
        self.clock += 1
        if oracle.aborted or oracle.completed:
            raise StaleOracleError(f"oracle {oracle.name()} is no longer active")
        own_key = self.principals[oracle.owner]
        if flow is None:
            if oracle.transcript:
                raise StaleOracleError(
                    f"oracle {oracle.name()} was already activated"
                )
            oracle.role = "initiator"
            oracle.ephemeral, oracle.own_msg = initiate(self.params, own_key, self.rng)
            oracle.transcript.append(("out", oracle.own_msg))
            return oracle.own_msg

        msg_in = self._coerce_flow(oracle, flow)
        if not oracle.transcript:
            oracle.role = "responder"
            oracle.ephemeral, oracle.own_msg = initiate(self.params, own_key, self.rng)
            shared = self._derive_or_abort(oracle, own_key, msg_in)
            oracle.transcript.append(("in", msg_in))
            oracle.transcript.append(("out", oracle.own_msg))
            self._complete(oracle, shared, init_msg=msg_in, resp_msg=oracle.own_msg)
            return oracle.own_msg

        # an initiator with its flow out is the only remaining live state
        shared = self._derive_or_abort(oracle, own_key, msg_in)
        oracle.transcript.append(("in", msg_in))
        self._complete(oracle, shared, init_msg=oracle.own_msg, resp_msg=msg_in)
        return None

    def reveal(self, oracle: SessionOracle) -> SessionKey:
        self.clock += 1
        if not oracle.completed:
            raise NoKeyError(f"oracle {oracle.name()} holds no session key")
        oracle.revealed = True
        return oracle.key

    def corrupt(self, identity: str):
        """Hand out a principal's long-term identity key."""
        self.clock += 1
        if identity not in self.principals:
            raise NoSuchPrincipalError(f"unknown principal {identity!r}")
        self.corrupted_at.setdefault(identity, self.clock)
        return self.principals[identity].d_id

    def extract_query(self, identity: str):
        """Adversary-chosen identity key; poisons that identity for tests."""
        self.clock += 1
        self.extracted.add(identity)
        if identity in self.principals:
            return self.principals[identity].d_id
        return extract(self.params, self.msk, identity).d_id

    def matching(self, first: SessionOracle, second: SessionOracle) -> bool:
        """Complementary roles, swapped endpoints, equal ordered transcripts."""
        if not (first.completed and second.completed):
            return False
        if first.role == second.role:
            return False
        if first.owner != second.peer or first.peer != second.owner:
            return False
        return self._canonical(first) == self._canonical(second)

    def fresh(self, oracle: SessionOracle) -> bool:
        """Whether a test query on this oracle would be meaningful."""
        if not oracle.completed:
            raise NotTestableError(f"oracle {oracle.name()} has not completed")
        for identity in (oracle.owner, oracle.peer):
            if identity in self.extracted:
                return False
            when = self.corrupted_at.get(identity)
            if when is not None:
                if self.mode == "br" or when < oracle.completed_at:
                    return False
        if oracle.revealed:
            return False
        for other in self.oracles:
            if other is not oracle and other.revealed and self.matching(oracle, other):
                return False
        return True

    def test(self, oracle: SessionOracle, coin: int, rng: random.Random | None = None):
        """Real key on coin=1, transcript-bound KDF of a uniform GT on coin=0."""
        self.clock += 1
        if coin not in (0, 1):
            raise ValueError(f"coin must be 0 or 1, got {coin!r}")
        if not self.fresh(oracle):
            raise TestRefusedError(f"oracle {oracle.name()} is not fresh")
        if coin == 1:
            return oracle.key
        rng = rng if rng is not None else self.rng
        group = self.params.group
        exponent = rng.randrange(group.q)
        element = gt_exp(pairing(group, self.params.g, self.params.g), exponent)
        init_id, resp_id, init_msg, resp_msg = oracle.binding
        return session_key(
            self.params, SharedSecret(element), init_id, resp_id, init_msg, resp_msg
        )

    # -- internals ----------------------------------------------------------

    def _coerce_flow(self, oracle: SessionOracle, flow) -> FlowMessage:
        if isinstance(flow, (bytes, bytearray)):
            try:
                flow = FlowMessage(r=decode_point(self.params.group, bytes(flow)))
            except MalformedElementError as exc:
                oracle.aborted = True
                raise InvalidFlowError(f"malformed flow point: {exc}") from exc
        try:
            validate_flow_point(self.params, flow.r)
        except InvalidFlowError:
            oracle.aborted = True
            raise
        return flow

    def _derive_or_abort(self, oracle, own_key, msg_in) -> SharedSecret:
        role = oracle.role
        try:
            shared, _ = derive(
                self.params,
                own_key,
                oracle.ephemeral,
                oracle.own_msg,
                oracle.peer,
                msg_in,
                role,
            )
            return shared
        except InvalidFlowError:
            oracle.aborted = True
            raise

    def _complete(self, oracle, shared, init_msg, resp_msg):
        if oracle.role == "initiator":
            init_id, resp_id = oracle.owner, oracle.peer
        else:
            init_id, resp_id = oracle.peer, oracle.owner
        oracle.binding = (init_id, resp_id, init_msg, resp_msg)
        oracle.key = session_key(
            self.params, shared, init_id, resp_id, init_msg, resp_msg
        )
        oracle.completed = True
        oracle.completed_at = self.clock

    def _canonical(self, oracle: SessionOracle):
        flows = []
        for direction, msg in oracle.transcript:
            initiator_sent = (direction == "out") == (oracle.role == "initiator")
            flows.append((initiator_sent, encode_point(self.params.group, msg.r)))
        # order as (initiator flow, responder flow)
        flows.sort(key=lambda item: not item[0])
        return tuple(flows)


def make_world(
    k_bits: int = 16,
    seed=None,
    mode: str = "br",
    pi_variant: PiVariant = PiVariant.HASH_HALF,
    principals=(),
) -> World:
    """Convenience constructor wiring setup() into a deterministic world."""
    params, msk = setup(k_bits, seed, pi_variant)
    if seed is None:
        rng = random.Random()
    else:
        seed_bytes = seed if isinstance(seed, bytes) else str(seed).encode("utf-8")
        rng = random.Random(b"idak-world:" + seed_bytes)
    world = World(params, msk, mode=mode, rng=rng)
    for identity in principals:
        world.add_principal(identity)
    return world


# ---------------------------------------------------------------------------
# scenario runner
# ---------------------------------------------------------------------------

_ERROR_NAMES = {
    InvalidFlowError: "invalid-flow",
    StaleOracleError: "stale-oracle",
    NoKeyError: "no-key",
    NoSuchPrincipalError: "no-such-principal",
    NotTestableError: "not-testable",
    TestRefusedError: "test-refused",
}


def _error_name(exc: Exception) -> str:
    for cls in type(exc).__mro__:
        if cls in _ERROR_NAMES:
            return _ERROR_NAMES[cls]
    return type(exc).__name__


class _ScenarioState:
    def __init__(self, defaults: dict):
        self.defaults = defaults
        self.world: World | None = None
        self.oracles: dict[str, SessionOracle] = {}
        self.outputs: dict[str, FlowMessage] = {}
        self.test_results: dict[str, SessionKey] = {}

    def ensure_world(self):
        if self.world is None:
            cfg = self.defaults
            self.world = make_world(
                k_bits=cfg.get("k_bits", 16),
                seed=cfg.get("seed", "scenario"),
                mode=cfg.get("mode", "br"),
                pi_variant=PiVariant(cfg.get("pi", "hash-half")),
                principals=cfg.get("principals", ()),
            )
        return self.world

    def oracle(self, label: str) -> SessionOracle:
        if label not in self.oracles:
            raise ScenarioError(f"unknown oracle label {label!r}")
        return self.oracles[label]


def run_scenario(lines, k_bits: int = 16, seed="scenario", mode: str = "br") -> dict:
    """Execute a JSON-lines scenario and return a replayable report.

    Each line is a query {"q": ...}, an {"assert": ...}, or a leading
    {"config": ...} overriding the defaults.  Flow arguments are null for
    an initiator activation, "@LABEL.out" for another oracle's emitted
    flow, or hex bytes of a point encoding.  Queries may carry
    "expect_error" naming the error they must fail with.  Failed
    expectations and assertions are collected, not raised.
    """
    state = _ScenarioState({"k_bits": k_bits, "seed": seed, "mode": mode})
    report = {"failures": [], "log": [], "queries": 0, "assertions": 0}
    for number, raw in enumerate(lines, start=1):
        raw = raw.strip()
        if not raw or raw.startswith("#"):
            continue
        try:
            entry = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise ScenarioError(f"line {number}: bad JSON: {exc}") from exc
        if "config" in entry:
            if state.world is not None:
                raise ScenarioError(f"line {number}: config after queries")
            state.defaults.update(entry["config"])
            continue
        if "q" in entry:
            report["queries"] += 1
            _run_query(state, entry, number, report)
        elif "assert" in entry:
            report["assertions"] += 1
            _run_assert(state, entry, number, report)
        else:
            raise ScenarioError(f"line {number}: neither query nor assertion")
    world = state.ensure_world()
    report["mode"] = world.mode
    report["params"] = {
        "p": world.params.group.p,
        "q": world.params.group.q,
        "h": world.params.group.h,
    }
    report["ok"] = not report["failures"]
    return report


def _resolve_flow(state: _ScenarioState, raw):
    if raw is None:
        return None
    if isinstance(raw, str) and raw.startswith("@"):
        label, _, field_name = raw[1:].partition(".")
        if field_name != "out":
            raise ScenarioError(f"unsupported back-reference {raw!r}")
        if label not in state.outputs:
            raise ScenarioError(f"back-reference to {label!r} before any output")
        return state.outputs[label]
    if isinstance(raw, str):
        try:
            return bytes.fromhex(raw)
        except ValueError as exc:
            raise ScenarioError(f"flow is neither reference nor hex: {raw!r}") from exc
    raise ScenarioError(f"bad flow value {raw!r}")


def _run_query(state: _ScenarioState, entry: dict, number: int, report: dict):
    world = state.ensure_world()
    expect_error = entry.get("expect_error")
    record = {"line": number, "q": entry["q"], "ok": True, "result": None}
    try:
        kind = entry["q"]
        if kind == "send":
            label = entry["oracle"]
            if label not in state.oracles:
                state.oracles[label] = world.new_oracle(entry["i"], entry["j"])
            oracle = state.oracles[label]
            out = world.send(oracle, _resolve_flow(state, entry.get("x")))
            if out is not None:
                state.outputs[label] = out
                record["result"] = encode_point(world.params.group, out.r).hex()
        elif kind == "reveal":
            key = world.reveal(state.oracle(entry["oracle"]))
            record["result"] = key.key.hex()
        elif kind == "corrupt":
            point = world.corrupt(entry["i"])
            record["result"] = encode_point(world.params.group, point).hex()
        elif kind == "extract":
            point = world.extract_query(entry["id"])
            record["result"] = encode_point(world.params.group, point).hex()
        elif kind == "test":
            key = world.test(state.oracle(entry["oracle"]), entry["coin"])
            state.test_results[entry["oracle"]] = key
            record["result"] = key.key.hex()
        else:
            raise ScenarioError(f"line {number}: unknown query {kind!r}")
        if expect_error is not None:
            record["ok"] = False
            report["failures"].append(
                {"line": number, "reason": f"expected {expect_error}, query succeeded"}
            )
    except ScenarioError:
        raise
    except Exception as exc:  # noqa: BLE001 - adversary queries fail by contract
        name = _error_name(exc)
        record["error"] = name
        if expect_error != name:
            record["ok"] = False
            report["failures"].append(
                {"line": number, "reason": f"unexpected error {name}: {exc}"}
            )
    report["log"].append(record)


def _run_assert(state: _ScenarioState, entry: dict, number: int, report: dict):
    world = state.ensure_world()
    kind = entry["assert"]
    record = {"line": number, "assert": kind, "ok": True}
    try:
        if kind in ("keys-equal", "keys-differ"):
            key_a = state.oracle(entry["a"]).key
            key_b = state.oracle(entry["b"]).key
            if key_a is None or key_b is None:
                raise ScenarioError(f"line {number}: oracle without key")
            holds = (key_a == key_b) == (kind == "keys-equal")
        elif kind == "matching":
            holds = world.matching(
                state.oracle(entry["a"]), state.oracle(entry["b"])
            ) == entry.get("expect", True)
        elif kind == "fresh":
            holds = world.fresh(state.oracle(entry["oracle"])) == entry.get(
                "expect", True
            )
        elif kind == "completed":
            holds = state.oracle(entry["oracle"]).completed == entry.get("expect", True)
        elif kind == "test-real-key":
            oracle = state.oracle(entry["oracle"])
            holds = state.test_results.get(entry["oracle"]) == oracle.key
        elif kind == "test-random-key":
            oracle = state.oracle(entry["oracle"])
            result = state.test_results.get(entry["oracle"])
            holds = result is not None and result != oracle.key
        else:
            raise ScenarioError(f"line {number}: unknown assertion {kind!r}")
    except ScenarioError:
        raise
    except Exception as exc:  # noqa: BLE001
        holds = False
        record["error"] = _error_name(exc)
    if not holds:
        record["ok"] = False
        report["failures"].append(
            {"line": number, "reason": f"assertion {kind} failed"}
        )
    report["log"].append(record)
