"""Hex-armored key files with a one-line header.

Every file is two lines: a header naming the entry kind, then the
payload in hex.  Payloads reuse the binary encodings of the underlying
values, so a file round-trips exactly and two runs with the same seed
produce byte-identical files.
"""

from idak.bilinear import (
    GroupParams,
    coord_size,
    decode_group_params,
    decode_point,
    encode_group_params,
    encode_point,
    hash_to_group,
    scalar_exp,
)
from idak.errors import KeystoreError, MalformedElementError
from idak.protocol import FlowMessage, IdentityKey, SessionKey

HEADER_MAGIC = "idak keystore v1"
KINDS = ("params", "master", "identity", "session", "state")
SESSION_KEY_SIZE = 32


def write_entry(path, kind, payload):
    """Store one armored entry, overwriting whatever the path held."""
    if kind not in KINDS:
        raise KeystoreError(f"unknown entry kind {kind!r}")
    text = f"{HEADER_MAGIC} kind={kind}\n{payload.hex()}\n"
    with open(path, "w", encoding="ascii") as handle:
        handle.write(text)


def read_entry(path, expect_kind=None):
    """Load one armored entry, checking the kind when asked to."""
    with open(path, "r", encoding="ascii") as handle:
        lines = [line.strip() for line in handle.read().splitlines()]
    lines = [line for line in lines if line]
    if len(lines) != 2:
        raise KeystoreError("key file must be a header line plus a payload line")
    header, armored = lines
    if not header.startswith(HEADER_MAGIC):
        raise KeystoreError("missing keystore header")
    fields = dict(
        token.split("=", 1) for token in header[len(HEADER_MAGIC) :].split() if "=" in token
    )
    kind = fields.get("kind")
    if kind not in KINDS:
        raise KeystoreError("header does not name a known entry kind")
    if expect_kind is not None and kind != expect_kind:
        raise KeystoreError(f"expected a {expect_kind} entry, found {kind}")
    try:
        payload = bytes.fromhex(armored)
    except ValueError as exc:
        raise KeystoreError("payload is not valid hex") from exc
    return kind, payload


# ---------------------------------------------------------------------------
# kind-specific payloads
# ---------------------------------------------------------------------------


def save_group(path, group):
    write_entry(path, "params", encode_group_params(group))


def load_group(path) -> GroupParams:
    _, payload = read_entry(path, "params")
    try:
        return decode_group_params(payload)
    except MalformedElementError as exc:
        raise KeystoreError(f"bad parameter payload: {exc}") from exc


def save_master(path, group, alpha):
    if not 1 <= alpha < group.q:
        raise KeystoreError("master secret out of range")
    write_entry(path, "master", alpha.to_bytes(_scalar_size(group), "big"))


def load_master(path, group) -> int:
    _, payload = read_entry(path, "master")
    alpha = int.from_bytes(payload, "big")
    if len(payload) != _scalar_size(group) or not 1 <= alpha < group.q:
        raise KeystoreError("master secret does not fit the parameters")
    return alpha


def save_identity(path, group, key):
    body = (
        _sized(key.identity)
        + encode_point(group, key.g_id)
        + encode_point(group, key.d_id)
    )
    write_entry(path, "identity", body)


def load_identity(path, group) -> IdentityKey:
    _, payload = read_entry(path, "identity")
    try:
        ident, offset = _take_sized(payload, 0)
        g_id, offset = _take_point(group, payload, offset)
        d_id, offset = _take_point(group, payload, offset)
    except (MalformedElementError, IndexError) as exc:
        raise KeystoreError(f"bad identity payload: {exc}") from exc
    if offset != len(payload):
        raise KeystoreError("identity payload has trailing bytes")
    if not ident:
        raise KeystoreError("identity payload names nobody")
    if g_id != hash_to_group(group, ident):
        raise KeystoreError("identity key does not belong to these parameters")
    if d_id.is_identity() or not scalar_exp(group, d_id, group.q).is_identity():
        raise KeystoreError("identity key point is outside the subgroup")
    return IdentityKey(identity=ident, g_id=g_id, d_id=d_id)


def save_session(path, key):
    if len(key.key) != SESSION_KEY_SIZE:
        raise KeystoreError("session keys are 32 bytes")
    write_entry(path, "session", key.key)


def load_session(path) -> SessionKey:
    _, payload = read_entry(path, "session")
    if len(payload) != SESSION_KEY_SIZE:
        raise KeystoreError("session keys are 32 bytes")
    return SessionKey(key=payload)


def save_state(path, group, peer_id, x, msg):
    """Persist the initiator's half-open session between commands."""
    if not 1 <= x < group.q:
        raise KeystoreError("ephemeral out of range")
    body = (
        _sized(peer_id)
        + x.to_bytes(_scalar_size(group), "big")
        + encode_point(group, msg.r)
    )
    write_entry(path, "state", body)


def load_state(path, group):
    _, payload = read_entry(path, "state")
    try:
        peer_id, offset = _take_sized(payload, 0)
        size = _scalar_size(group)
        x = int.from_bytes(payload[offset : offset + size], "big")
        r, end = _take_point(group, payload, offset + size)
    except (MalformedElementError, IndexError) as exc:
        raise KeystoreError(f"bad state payload: {exc}") from exc
    if end != len(payload) or not peer_id or not 1 <= x < group.q:
        raise KeystoreError("state payload is inconsistent")
    return peer_id, x, FlowMessage(r=r)


# ---------------------------------------------------------------------------
# framing helpers
# ---------------------------------------------------------------------------


def _scalar_size(group):
    return (group.q.bit_length() + 7) // 8


def _sized(blob):
    if len(blob) > 0xFFFF:
        raise KeystoreError("field too long to frame")
    return len(blob).to_bytes(2, "big") + blob


def _take_sized(data, offset):
    if offset + 2 > len(data):
        raise KeystoreError("truncated length prefix")
    size = int.from_bytes(data[offset : offset + 2], "big")
    end = offset + 2 + size
    if end > len(data):
        raise KeystoreError("truncated field")
    return data[offset + 2 : end], end


def _take_point(group, data, offset):
    if data[offset : offset + 1] == b"\x00":
        return decode_point(group, b"\x00"), offset + 1
    size = 1 + 2 * coord_size(group)
    if offset + size > len(data):
        raise KeystoreError("truncated point")
    return decode_point(group, data[offset : offset + size]), offset + size
