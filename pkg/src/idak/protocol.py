"""Identity-based authenticated key agreement.

A trusted authority runs setup() to fix public parameters and a master
secret alpha, and hands each party the identity key d_id = H(id)^alpha
via extract().  A session is one flow in each direction,

    initiator:  R_A = g_A^x        responder:  R_B = g_B^y

with g_A = H(id_A), g_B = H(id_B).  Both sides blend the flows through a
short public function pi and land on the same GT element

    sk = e(g_A, g_B) ^ ((x + s_A) * (y + s_B) * alpha),

where s_A = pi(R_A, R_B) and s_B = pi(R_B, R_A).  No party ever learns
alpha, and no explicit key confirmation flow is needed.

derive() implements the four evaluation schedules of that formula, choice
1 or 2 with or without precomputation, and reports an operation tally so
the schedules' costs can be compared against the expected table.  The
perfect-forward-secrecy hardened variant adds one extra responder element
and hashes an ephemeral Diffie-Hellman value into the session key.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass
from enum import Enum
from typing import Literal

from .bilinear import (
    GElem,
    GTElem,
    GroupParams,
    _as_identity_bytes,
    decode_point,
    encode_gt,
    encode_point,
    gt_exp,
    hash_to_group,
    in_subgroup,
    is_on_curve,
    pairing,
    point_add,
    random_scalar,
    scalar_exp,
)
from .errors import (
    DegenerateExponentError,
    InvalidEphemeralError,
    InvalidFlowError,
    MalformedElementError,
)

# Domain tags (0x01 is taken by hash_to_group).
TAG_PI = b"\x02"
TAG_PFS_KDF = b"\x03"

DEFAULT_KDF_TAG = b"idak-kdf-v1"

# Fixed identity whose curve image serves as the public base point.
GENERATOR_ID = b"idak-base-point"

FLOW_VERSION = 0x01
ROLE_BYTES = {"initiator": 0x00, "responder": 0x01}

Role = Literal["initiator", "responder"]


class PiVariant(Enum):
    """How the two flows are compressed into the short exponents s_A, s_B."""

    HASH_HALF = "hash-half"
    XOR_HALF = "xor-half"
    FIRST_ONLY = "first-only"


@dataclass(frozen=True)
class SystemParams:
    group: GroupParams
    g: GElem
    pi_variant: PiVariant
    kdf_tag: bytes


@dataclass(frozen=True)
class MasterSecret:
    alpha: int


@dataclass(frozen=True)
class IdentityKey:
    identity: bytes
    g_id: GElem
    d_id: GElem


@dataclass(frozen=True)
class FlowMessage:
    r: GElem


@dataclass(frozen=True)
class SharedSecret:
    value: GTElem


@dataclass(frozen=True)
class SessionKey:
    key: bytes


@dataclass(frozen=True)
class DeriveStrategy:
    choice: int
    precomputed: bool

    def label(self) -> str:
        return f"c{self.choice}-{'pre' if self.precomputed else 'nopre'}"


STRATEGIES = (
    DeriveStrategy(1, False),
    DeriveStrategy(1, True),
    DeriveStrategy(2, False),
    DeriveStrategy(2, True),
)


def parse_strategy(label: str) -> DeriveStrategy:
    for strategy in STRATEGIES:
        if strategy.label() == label:
            return strategy
    raise ValueError(f"unknown strategy {label!r}")


@dataclass
class OpCounts:
    """Online-phase operation tally for one derivation.

    exp_g counts group exponentiations with weight 0.5 when the exponent
    is a pi output (half-length) and 1.0 otherwise; without precomputation
    the exponentiation producing the party's own flow counts too.
    """

    pairings: int = 0
    exp_g: float = 0.0
    mul_g: int = 0
    exp_gt: int = 0


# ---------------------------------------------------------------------------
# authority operations
# ---------------------------------------------------------------------------


def setup(
    k_bits: int,
    seed=None,
    pi_variant: PiVariant = PiVariant.HASH_HALF,
    kdf_tag: bytes = DEFAULT_KDF_TAG,
) -> tuple[SystemParams, MasterSecret]:
    """Generate public parameters and the authority's master secret."""
    from .bilinear import instance_generate

    group = instance_generate(k_bits, seed)
    g = hash_to_group(group, GENERATOR_ID)
    if seed is None:
        alpha_rng = random.Random()
    else:
        seed_bytes = seed if isinstance(seed, bytes) else str(seed).encode("utf-8")
        alpha_rng = random.Random(b"idak-master:" + seed_bytes)
    alpha = random_scalar(group, alpha_rng)
    params = SystemParams(group=group, g=g, pi_variant=pi_variant, kdf_tag=kdf_tag)
    return params, MasterSecret(alpha=alpha)


def extract(params: SystemParams, msk: MasterSecret, identity) -> IdentityKey:
    """Issue the identity key d_id = H(id)^alpha."""
    ident = _as_identity_bytes(identity)
    if not 1 <= msk.alpha < params.group.q:
        raise InvalidEphemeralError("master secret out of range")
    g_id = hash_to_group(params.group, ident)
    d_id = scalar_exp(params.group, g_id, msk.alpha)
    return IdentityKey(identity=ident, g_id=g_id, d_id=d_id)


# ---------------------------------------------------------------------------
# the pi compression
# ---------------------------------------------------------------------------


def _nonzero(value: int) -> int:
    # the codomain excludes zero; zero would erase the ephemeral binding
    return value if value != 0 else 1


def xor_half_value(x_first: int, x_second: int, field_bits: int) -> int:
    """Bare arithmetic of the xor variant: xor, keep the low half bits."""
    return _nonzero((x_first ^ x_second) % (1 << (field_bits // 2)))


def pi_value(params: SystemParams, first: GElem, second: GElem) -> int:
    """Compress an ordered flow pair into a short nonzero exponent."""
    if first.is_identity() or second.is_identity():
        raise InvalidFlowError("pi is undefined on the identity")
    group = params.group
    variant = params.pi_variant
    if variant is PiVariant.XOR_HALF:
        return xor_half_value(first.x, second.x, group.p.bit_length())
    half_bits = (group.q.bit_length() + 1) // 2
    if variant is PiVariant.FIRST_ONLY:
        material = TAG_PI + encode_point(group, first)
    else:
        material = TAG_PI + encode_point(group, first) + encode_point(group, second)
    digest = hashlib.sha256(material).digest()
    return _nonzero(int.from_bytes(digest, "big") % (1 << half_bits))


# ---------------------------------------------------------------------------
# exchange
# ---------------------------------------------------------------------------


def initiate(params: SystemParams, own: IdentityKey, rng: random.Random):
    """Draw an ephemeral x and emit the flow g_id^x.

    The responder's flow is computed the same way, so both roles use this.
    """
    x = random_scalar(params.group, rng)
    return x, FlowMessage(r=scalar_exp(params.group, own.g_id, x))


def validate_flow_point(params: SystemParams, point: GElem) -> None:
    """Reject flows outside the proper subgroup before they reach a key."""
    if not is_on_curve(params.group, point):
        raise InvalidFlowError("flow point is not on the curve")
    if point.is_identity():
        raise InvalidFlowError("flow point is the identity")
    if not scalar_exp(params.group, point, params.group.q).is_identity():
        raise InvalidFlowError("flow point is outside the order-q subgroup")


def derive(
    params: SystemParams,
    own: IdentityKey,
    own_x: int,
    own_msg: FlowMessage,
    peer_id,
    peer_msg: FlowMessage,
    role: Role,
    strategy: DeriveStrategy = DeriveStrategy(1, False),
) -> tuple[SharedSecret, OpCounts]:
    """Compute the shared GT secret for one side of a completed exchange.

    All four strategies evaluate the same element; they differ in where
    the exponentiations land and whether the party's own flow work was
    done ahead of time.  A combined exponent that vanishes mod q is
    rejected: the responder drops the session and an initiator is
    expected to retry with a fresh ephemeral.
    """
    if role not in ROLE_BYTES:
        raise ValueError(f"unknown role {role!r}")
    if strategy.choice not in (1, 2):
        raise ValueError(f"unknown strategy choice {strategy.choice}")
    group = params.group
    if not 1 <= own_x < group.q:
        raise InvalidEphemeralError("ephemeral exponent out of range")
    validate_flow_point(params, peer_msg.r)
    if not is_on_curve(group, own_msg.r) or own_msg.r.is_identity():
        raise InvalidFlowError("own flow point is invalid")

    # the initiator's flow is the first pi argument for s_init
    if role == "initiator":
        r_init, r_resp = own_msg.r, peer_msg.r
    else:
        r_init, r_resp = peer_msg.r, own_msg.r
    s_init = pi_value(params, r_init, r_resp)
    s_resp = pi_value(params, r_resp, r_init)
    own_s, peer_s = (s_init, s_resp) if role == "initiator" else (s_resp, s_init)

    own_exp = (own_x + own_s) % group.q
    if own_exp == 0:
        raise DegenerateExponentError("own combined exponent vanished mod q")

    peer_g = hash_to_group(group, peer_id)
    counts = OpCounts()
    # blend of the peer's long-term point and flow: g_peer^s_peer * R_peer
    blended_peer = point_add(group, scalar_exp(group, peer_g, peer_s), peer_msg.r)
    counts.exp_g += 0.5
    counts.mul_g += 1
    if blended_peer.is_identity():
        raise DegenerateExponentError("peer combined exponent vanished mod q")

    if not strategy.precomputed:
        # online cost of having produced the own flow g_id^own_x
        counts.exp_g += 1.0

    if strategy.choice == 1:
        if strategy.precomputed:
            # d_id^own_x is assumed done offline alongside the flow
            offline_part = scalar_exp(group, own.d_id, own_x)
            online_part = scalar_exp(group, own.d_id, own_s)
            counts.exp_g += 0.5
            own_point = point_add(group, offline_part, online_part)
            counts.mul_g += 1
        else:
            own_point = scalar_exp(group, own.d_id, own_exp)
            counts.exp_g += 1.0
        shared = pairing(group, own_point, blended_peer)
        counts.pairings += 1
    else:
        base = pairing(group, blended_peer, own.d_id)
        counts.pairings += 1
        shared = gt_exp(base, own_exp)
        counts.exp_gt += 1

    return SharedSecret(value=shared), counts


def session_key(
    params: SystemParams,
    sk: SharedSecret,
    id_a,
    id_b,
    r_a: FlowMessage,
    r_b: FlowMessage,
) -> SessionKey:
    """Bind the GT secret to identities and transcript, KDF to 32 bytes."""
    material = (
        params.kdf_tag
        + encode_gt(params.group, sk.value)
        + _as_identity_bytes(id_a)
        + _as_identity_bytes(id_b)
        + encode_point(params.group, r_a.r)
        + encode_point(params.group, r_b.r)
    )
    return SessionKey(key=hashlib.sha256(material).digest())


# ---------------------------------------------------------------------------
# forward-secrecy hardened variant
# ---------------------------------------------------------------------------


def pfs_respond(params: SystemParams, own: IdentityKey, peer_id, rng: random.Random):
    """Responder flow plus the extra element g_peer^y under the same y."""
    y = random_scalar(params.group, rng)
    msg = FlowMessage(r=scalar_exp(params.group, own.g_id, y))
    extra = scalar_exp(params.group, hash_to_group(params.group, peer_id), y)
    return y, msg, extra


def pfs_verify_extra(
    params: SystemParams,
    own: IdentityKey,
    peer_id,
    peer_msg: FlowMessage,
    extra: GElem,
) -> bool:
    """Initiator-side check that the extra element reuses the flow's y.

    e(extra, g_peer) = e(g_own^y, g_peer) must equal e(g_own, R_peer).
    """
    validate_flow_point(params, peer_msg.r)
    validate_flow_point(params, extra)
    peer_g = hash_to_group(params.group, peer_id)
    left = pairing(params.group, extra, peer_g)
    right = pairing(params.group, own.g_id, peer_msg.r)
    return left == right


def pfs_session_key(params: SystemParams, sk: SharedSecret, dh: GElem) -> SessionKey:
    """Hash the ephemeral Diffie-Hellman point into the key.

    dh = g_initiator^(x*y), computed as extra^x by the initiator and as
    R_initiator^y by the responder.  An attacker who later learns alpha
    can rebuild sk from the transcript but not dh.
    """
    if dh.is_identity():
        raise InvalidFlowError("degenerate Diffie-Hellman point")
    material = (
        TAG_PFS_KDF
        + encode_point(params.group, dh)
        + encode_gt(params.group, sk.value)
    )
    return SessionKey(key=hashlib.sha256(material).digest())


# ---------------------------------------------------------------------------
# what master-key compromise yields
# ---------------------------------------------------------------------------


def master_compromise_compute(
    params: SystemParams,
    alpha: int,
    id_a,
    id_b,
    r_a: FlowMessage,
    r_b: FlowMessage,
) -> SharedSecret:
    """Recover the base protocol's GT secret from a transcript and alpha.

    e(g_A^{s_A} * R_A, g_B^{s_B} * R_B)^alpha needs no ephemeral and no
    identity key, which is exactly why the base protocol has no forward
    secrecy against authority compromise.
    """
    group = params.group
    if not 1 <= alpha < group.q:
        raise InvalidEphemeralError("alpha out of range")
    validate_flow_point(params, r_a.r)
    validate_flow_point(params, r_b.r)
    s_a = pi_value(params, r_a.r, r_b.r)
    s_b = pi_value(params, r_b.r, r_a.r)
    g_a = hash_to_group(group, id_a)
    g_b = hash_to_group(group, id_b)
    blended_a = point_add(group, scalar_exp(group, g_a, s_a), r_a.r)
    blended_b = point_add(group, scalar_exp(group, g_b, s_b), r_b.r)
    return SharedSecret(value=gt_exp(pairing(group, blended_a, blended_b), alpha))


# ---------------------------------------------------------------------------
# flow wire format
# ---------------------------------------------------------------------------


def encode_flow(
    params: SystemParams,
    role: Role,
    sender_id,
    msg: FlowMessage,
    extra: GElem | None = None,
) -> bytes:
    """version || role || id length || id || point || presence || [extra]."""
    ident = _as_identity_bytes(sender_id)
    if len(ident) > 0xFFFF:
        raise InvalidFlowError("identity too long for the wire format")
    out = bytes([FLOW_VERSION, ROLE_BYTES[role]])
    out += len(ident).to_bytes(2, "big") + ident
    out += encode_point(params.group, msg.r)
    if extra is None:
        out += b"\x00"
    else:
        out += b"\x01" + encode_point(params.group, extra)
    return out


def decode_flow(params: SystemParams, data: bytes):
    """Parse a wire flow into (role, sender_id, FlowMessage, extra | None)."""
    try:
        if data[0] != FLOW_VERSION:
            raise InvalidFlowError(f"unsupported flow version {data[0]}")
        role = {v: k for k, v in ROLE_BYTES.items()}[data[1]]
        id_len = int.from_bytes(data[2:4], "big")
        offset = 4
        ident = data[offset : offset + id_len]
        if len(ident) != id_len or not ident:
            raise InvalidFlowError("truncated identity")
        offset += id_len
        point, offset = _take_point(params.group, data, offset)
        presence = data[offset]
        offset += 1
        extra = None
        if presence == 0x01:
            extra, offset = _take_point(params.group, data, offset)
        elif presence != 0x00:
            raise InvalidFlowError("bad presence byte")
        if offset != len(data):
            raise InvalidFlowError("trailing bytes in flow")
        return role, ident, FlowMessage(r=point), extra
    except (IndexError, KeyError, MalformedElementError) as exc:
        raise InvalidFlowError(f"malformed flow: {exc}") from exc


def _take_point(group: GroupParams, data: bytes, offset: int):
    if data[offset] == 0x00:
        return decode_point(group, b"\x00"), offset + 1
    width = 1 + 2 * ((group.p.bit_length() + 7) // 8)
    point = decode_point(group, data[offset : offset + width])
    return point, offset + width
