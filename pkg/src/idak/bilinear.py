"""Symmetric bilinear pairing over a toy supersingular curve.

The group G is the order-q subgroup of E(F_p) for the curve

    y^2 = x^3 + x   over F_p,   p = h*q - 1,   p = 3 (mod 4),

which is supersingular with exactly p + 1 points, so q | p + 1 and the
embedding degree is 2.  GT is the order-q subgroup of F_{p^2}^*, with
F_{p^2} = F_p[i] / (i^2 + 1); this quotient is a field precisely because
p = 3 (mod 4) makes -1 a non-residue.

The pairing is the modified Tate pairing

    e(P, Q) = f_{q,P}(phi(Q)) ^ ((p^2 - 1) / q),

where phi(x, y) = (-x, i*y) is a distortion map into E(F_{p^2}) \ E(F_p).
Using phi on the second argument makes the pairing symmetric and
non-degenerate on G x G, in particular e(P, P) != 1.

Parameter sizes here are deliberately small.  Nothing in this module is
safe for production use.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass

from .errors import (
    HashToGroupError,
    InvalidIdentityError,
    MalformedElementError,
    ParameterSearchError,
)

# Domain tag for hashing identities onto the curve.
TAG_HASH_TO_GROUP = b"\x01"

# Search budgets.  Both are far beyond what the admissible sizes need.
COFACTOR_CANDIDATE_BOUND = 1 << 20
HASH_COUNTER_BOUND = 1 << 16

MILLER_RABIN_ROUNDS = 40


@dataclass(frozen=True)
class GroupParams:
    """Public curve parameters: p = h*q - 1 with q prime of k_bits bits."""

    p: int
    q: int
    h: int
    k_bits: int


@dataclass(frozen=True)
class GElem:
    """Affine point on y^2 = x^3 + x, with (None, None) as the identity."""

    x: int | None
    y: int | None

    def is_identity(self) -> bool:
        return self.x is None


#: The point at infinity, shared by every parameter set.
INFINITY = GElem(None, None)


@dataclass(frozen=True)
class GTElem:
    """Element a + b*i of F_{p^2}, normally inside the order-q subgroup."""

    a: int
    b: int
    p: int

    def is_one(self) -> bool:
        return self.a == 1 and self.b == 0


# ---------------------------------------------------------------------------
# primality and parameter generation
# ---------------------------------------------------------------------------

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_probable_prime(n: int, rounds: int = MILLER_RABIN_ROUNDS) -> bool:
    """Miller-Rabin with `rounds` bases drawn deterministically from n."""
    if n < 2:
        return False
    for sp in _SMALL_PRIMES:
        if n % sp == 0:
            return n == sp
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    # Bases keyed to the candidate keep repeated checks reproducible.
    base_rng = random.Random(n)
    for _ in range(rounds):
        a = base_rng.randrange(2, n - 1)
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def instance_generate(k_bits: int, seed) -> GroupParams:
    """Deterministically derive curve parameters from a seed.

    Samples a prime q of exactly k_bits bits from the seeded stream, then
    scans even cofactors h until p = h*q - 1 is a prime with p = 3 (mod 4).
    Skipping h divisible by q keeps q^2 from dividing p + 1, so the q-part
    of E(F_p) is cyclic.
    """
    if not 3 <= k_bits <= 512:
        raise ValueError(f"k_bits must be in [3, 512], got {k_bits}")
    rng = random.Random(seed)
    while True:
        q = (1 << (k_bits - 1)) | rng.getrandbits(k_bits - 1) | 1
        if is_probable_prime(q):
            break
    h = 0
    for _ in range(COFACTOR_CANDIDATE_BOUND):
        h += 2
        if h % q == 0:
            continue
        p = h * q - 1
        if p % 4 != 3:
            continue
        if is_probable_prime(p):
            return GroupParams(p=p, q=q, h=h, k_bits=k_bits)
    raise ParameterSearchError(
        f"no admissible cofactor for q={q} within {COFACTOR_CANDIDATE_BOUND} candidates"
    )


# ---------------------------------------------------------------------------
# curve arithmetic
# ---------------------------------------------------------------------------


def is_on_curve(params: GroupParams, point: GElem) -> bool:
    """Whether the point is the identity or satisfies y^2 = x^3 + x mod p."""
    if point.is_identity():
        return True
    p = params.p
    if not (0 <= point.x < p and 0 <= point.y < p):
        return False
    return point.y * point.y % p == (point.x * point.x * point.x + point.x) % p


def _require_on_curve(params: GroupParams, point: GElem) -> None:
    if not is_on_curve(params, point):
        raise MalformedElementError(f"point {point!r} is not on the curve")


def _add_raw(p: int, a: GElem, b: GElem) -> GElem:
    """Chord-and-tangent addition without validation."""
    if a.is_identity():
        return b
    if b.is_identity():
        return a
    if a.x == b.x:
        if (a.y + b.y) % p == 0:
            return INFINITY
        lam = (3 * a.x * a.x + 1) * pow(2 * a.y, -1, p) % p
    else:
        lam = (b.y - a.y) * pow(b.x - a.x, -1, p) % p
    x3 = (lam * lam - a.x - b.x) % p
    y3 = (lam * (a.x - x3) - a.y) % p
    return GElem(x3, y3)


def point_add(params: GroupParams, a: GElem, b: GElem) -> GElem:
    """Group law on E(F_p)."""
    _require_on_curve(params, a)
    _require_on_curve(params, b)
    return _add_raw(params.p, a, b)


def point_negate(params: GroupParams, point: GElem) -> GElem:
    """Negation (x, y) -> (x, -y)."""
    _require_on_curve(params, point)
    if point.is_identity():
        return INFINITY
    return GElem(point.x, (-point.y) % params.p)


def scalar_exp(params: GroupParams, point: GElem, n: int) -> GElem:
    """n-fold group operation by double-and-add; negative n negates first."""
    _require_on_curve(params, point)
    n = int(n)
    if n < 0:
        point = GElem(point.x, (-point.y) % params.p) if not point.is_identity() else INFINITY
        n = -n
    result = INFINITY
    acc = point
    p = params.p
    while n:
        if n & 1:
            result = _add_raw(p, result, acc)
        n >>= 1
        if n:
            acc = _add_raw(p, acc, acc)
    return result


def in_subgroup(params: GroupParams, point: GElem) -> bool:
    """Whether the point lies in the order-q subgroup (identity counts)."""
    if not is_on_curve(params, point):
        return False
    return scalar_exp(params, point, params.q).is_identity()


# ---------------------------------------------------------------------------
# F_{p^2} helpers on bare (a, b) pairs, a + b*i with i^2 = -1
# ---------------------------------------------------------------------------


def _fp2_mul(p, a1, b1, a2, b2):
    return (a1 * a2 - b1 * b2) % p, (a1 * b2 + a2 * b1) % p


def _fp2_sqr(p, a, b):
    return (a * a - b * b) % p, (2 * a * b) % p


def _fp2_pow(p, a, b, e):
    ra, rb = 1, 0
    while e:
        if e & 1:
            ra, rb = _fp2_mul(p, ra, rb, a, b)
        e >>= 1
        if e:
            a, b = _fp2_sqr(p, a, b)
    return ra, rb


def _fp2_inv(p, a, b):
    d = pow(a * a + b * b, -1, p)
    return a * d % p, (-b * d) % p


# ---------------------------------------------------------------------------
# pairing
# ---------------------------------------------------------------------------


def distort(params: GroupParams, point: GElem):
    """Distortion map phi(x, y) = (-x, i*y) as F_{p^2} coordinate pairs."""
    _require_on_curve(params, point)
    if point.is_identity():
        return None
    return ((-point.x) % params.p, 0), (0, point.y)


def _line_value(p, a, b, xq, yq):
    """Line through points a, b of E(F_p), evaluated at (-xq, i*yq).

    Vertical lines (and lines through the identity) take values in F_p^*
    because the distorted x-coordinate is in F_p; the final exponentiation
    (p^2 - 1)/q = (p - 1) * h kills every F_p^* factor, so those cases
    contribute 1.  The evaluation point is never on a line through two
    F_p-rational points, so the returned value is never zero.
    """
    if a.is_identity() or b.is_identity():
        return 1, 0
    if a.x == b.x:
        if a is not b and (a.y + b.y) % p == 0:
            return 1, 0
        if a.y == 0:
            return 1, 0
        lam = (3 * a.x * a.x + 1) * pow(2 * a.y, -1, p) % p
    else:
        lam = (b.y - a.y) * pow(b.x - a.x, -1, p) % p
    # i*yq - y_a - lam * (-xq - x_a)  =  (lam*(xq + x_a) - y_a)  +  i*yq
    return (lam * (xq + a.x) - a.y) % p, yq


def pairing(params: GroupParams, left: GElem, right: GElem) -> GTElem:
    """Modified Tate pairing e(P, Q) = f_{q,P}(phi(Q)) ^ ((p^2-1)/q).

    Symmetric and bilinear on the order-q subgroup, with e(P, P) != 1 for
    P != identity.  By convention any identity argument gives 1.
    """
    _require_on_curve(params, left)
    _require_on_curve(params, right)
    p, q = params.p, params.q
    if left.is_identity() or right.is_identity():
        return GTElem(1, 0, p)
    xq, yq = right.x, right.y
    fa, fb = 1, 0
    t = left
    # Miller loop over the bits of q below the leading one.
    for bit in bin(q)[3:]:
        la, lb = _line_value(p, t, t, xq, yq)
        fa, fb = _fp2_sqr(p, fa, fb)
        fa, fb = _fp2_mul(p, fa, fb, la, lb)
        t = _add_raw(p, t, t)
        if bit == "1":
            la, lb = _line_value(p, t, left, xq, yq)
            fa, fb = _fp2_mul(p, fa, fb, la, lb)
            t = _add_raw(p, t, left)
    fa, fb = _fp2_pow(p, fa, fb, (p * p - 1) // q)
    return GTElem(fa, fb, p)


# ---------------------------------------------------------------------------
# GT arithmetic
# ---------------------------------------------------------------------------


def gt_one(params: GroupParams) -> GTElem:
    return GTElem(1, 0, params.p)


def gt_mul(z1: GTElem, z2: GTElem) -> GTElem:
    if z1.p != z2.p:
        raise MalformedElementError("GT elements from different fields")
    a, b = _fp2_mul(z1.p, z1.a, z1.b, z2.a, z2.b)
    return GTElem(a, b, z1.p)


def gt_exp(z: GTElem, n: int) -> GTElem:
    n = int(n)
    if n < 0:
        z = gt_inv(z)
        n = -n
    a, b = _fp2_pow(z.p, z.a, z.b, n)
    return GTElem(a, b, z.p)


def gt_inv(z: GTElem) -> GTElem:
    if z.a == 0 and z.b == 0:
        raise MalformedElementError("zero is not invertible")
    a, b = _fp2_inv(z.p, z.a, z.b)
    return GTElem(a, b, z.p)


# ---------------------------------------------------------------------------
# hashing and sampling
# ---------------------------------------------------------------------------


def _as_identity_bytes(identity) -> bytes:
    ident = identity.encode("utf-8") if isinstance(identity, str) else bytes(identity)
    if not ident:
        raise InvalidIdentityError("identity must be non-empty")
    return ident


def hash_to_group(params: GroupParams, identity) -> GElem:
    """Map an identity string to a non-identity point of the q-subgroup.

    Try-and-increment: x = SHA-256(tag || id || counter) mod p until
    x^3 + x is a square, take y = (x^3+x)^((p+1)/4), then clear the
    cofactor.  Results landing on the identity are skipped.
    """
    ident = _as_identity_bytes(identity)
    p, h = params.p, params.h
    qr_exp = (p - 1) // 2
    sqrt_exp = (p + 1) // 4
    for counter in range(HASH_COUNTER_BOUND):
        digest = hashlib.sha256(
            TAG_HASH_TO_GROUP + ident + counter.to_bytes(2, "big")
        ).digest()
        x = int.from_bytes(digest, "big") % p
        t = (x * x * x + x) % p
        if t == 0:
            # only x = 0 here, the order-2 point; cofactor clearing kills it
            continue
        if pow(t, qr_exp, p) != 1:
            continue
        y = pow(t, sqrt_exp, p)
        point = scalar_exp(params, GElem(x, y), h)
        if point.is_identity():
            continue
        return point
    raise HashToGroupError(
        f"no curve point for identity within {HASH_COUNTER_BOUND} counters"
    )


def random_scalar(params: GroupParams, rng: random.Random) -> int:
    """Uniform scalar in [1, q-1] by rejection sampling."""
    bits = params.q.bit_length()
    while True:
        value = rng.getrandbits(bits)
        if 1 <= value < params.q:
            return value


# ---------------------------------------------------------------------------
# encodings
# ---------------------------------------------------------------------------

PARAMS_ENCODING_VERSION = 0x01


def coord_size(params: GroupParams) -> int:
    return (params.p.bit_length() + 7) // 8


def encode_point(params: GroupParams, point: GElem) -> bytes:
    """0x00 for the identity, else 0x04 || x || y big-endian fixed width."""
    if point.is_identity():
        return b"\x00"
    _require_on_curve(params, point)
    n = coord_size(params)
    return b"\x04" + point.x.to_bytes(n, "big") + point.y.to_bytes(n, "big")


def decode_point(params: GroupParams, data: bytes) -> GElem:
    if data == b"\x00":
        return INFINITY
    n = coord_size(params)
    if len(data) != 1 + 2 * n or data[0] != 0x04:
        raise MalformedElementError("bad point encoding")
    point = GElem(
        int.from_bytes(data[1 : 1 + n], "big"),
        int.from_bytes(data[1 + n :], "big"),
    )
    _require_on_curve(params, point)
    return point


def encode_gt(params: GroupParams, z: GTElem) -> bytes:
    """Both F_p components big-endian, fixed width."""
    n = coord_size(params)
    return z.a.to_bytes(n, "big") + z.b.to_bytes(n, "big")


def decode_gt(params: GroupParams, data: bytes) -> GTElem:
    n = coord_size(params)
    if len(data) != 2 * n:
        raise MalformedElementError("bad GT encoding")
    a = int.from_bytes(data[:n], "big")
    b = int.from_bytes(data[n:], "big")
    if a >= params.p or b >= params.p or (a == 0 and b == 0):
        raise MalformedElementError("GT component out of range")
    return GTElem(a, b, params.p)


def _len_prefixed(value: int) -> bytes:
    raw = value.to_bytes((value.bit_length() + 7) // 8 or 1, "big")
    return len(raw).to_bytes(2, "big") + raw


def encode_group_params(params: GroupParams) -> bytes:
    """version || p || q || h, each big-endian with a 2-byte length prefix."""
    return (
        bytes([PARAMS_ENCODING_VERSION])
        + _len_prefixed(params.p)
        + _len_prefixed(params.q)
        + _len_prefixed(params.h)
    )


def decode_group_params(data: bytes) -> GroupParams:
    if not data or data[0] != PARAMS_ENCODING_VERSION:
        raise MalformedElementError("bad params encoding version")
    values = []
    offset = 1
    for _ in range(3):
        if offset + 2 > len(data):
            raise MalformedElementError("truncated params encoding")
        length = int.from_bytes(data[offset : offset + 2], "big")
        offset += 2
        if offset + length > len(data):
            raise MalformedElementError("truncated params encoding")
        values.append(int.from_bytes(data[offset : offset + length], "big"))
        offset += length
    if offset != len(data):
        raise MalformedElementError("trailing bytes in params encoding")
    p, q, h = values
    if p != h * q - 1 or p % 4 != 3 or h % 2 != 0 or h % q == 0:
        raise MalformedElementError("inconsistent group parameters")
    if not (is_probable_prime(p) and is_probable_prime(q)):
        raise MalformedElementError("group parameters are not prime")
    return GroupParams(p=p, q=q, h=h, k_bits=q.bit_length())
