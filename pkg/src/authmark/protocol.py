"""Hash/XOR authorship payloads, blind verification and dispute resolution.

The embedded payload is ``W-MSB || W-LSB`` where W-LSB is the digest of the
cover image and W-MSB is the keyword digest XOR-ed with it.  A verifier XORs
the two extracted halves back together and compares the result with the digest
of the claimed keyword; no cover image is needed.
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass, field

import numpy as np

from . import defaults
from .attacks import jpeg_attack, similarity_ratio
from .imaging import GrayImage
from .wmcore import CapacityError, EmbedParams, WatermarkBits, capacity, embed, extract

HASHES = {"sha256": hashlib.sha256, "sha1": hashlib.sha1}


def _hasher(hash_name: str):
    try:
        return HASHES[hash_name]
    except KeyError:
        raise ValueError(f"unknown hash {hash_name!r}; choose from {sorted(HASHES)}") from None


def digest_bits(hash_name: str = defaults.HASH_NAME) -> int:
    return _hasher(hash_name)().digest_size * 8


def _keyword_bytes(k: str | bytes) -> bytes:
    kb = k.encode("utf-8") if isinstance(k, str) else bytes(k)
    if not kb:
        raise ValueError("secret keyword must not be empty")
    return kb


def hash_keyword(k: str | bytes, hash_name: str = defaults.HASH_NAME) -> bytes:
    return _hasher(hash_name)(_keyword_bytes(k)).digest()


def canonical_image_bytes(img: GrayImage) -> bytes:
    return struct.pack(">II", img.width, img.height) + img.data


def hash_image(img: GrayImage, hash_name: str = defaults.HASH_NAME) -> bytes:
    """Digest of the pixels and dimensions, independent of the file format."""
    return _hasher(hash_name)(canonical_image_bytes(img)).digest()


def _xor(a: bytes, b: bytes) -> bytes:
    return bytes(x ^ y for x, y in zip(a, b, strict=True))


def to_bits(digest: bytes) -> np.ndarray:
    return np.unpackbits(np.frombuffer(digest, dtype=np.uint8))


def from_bits(bits) -> bytes:
    return np.packbits(np.asarray(bits, dtype=np.uint8)).tobytes()


@dataclass(frozen=True)
class WatermarkPayload:
    wmsb: bytes
    wlsb: bytes

    def __post_init__(self):
        if len(self.wmsb) != len(self.wlsb):
            raise ValueError("payload halves must have equal length")

    def to_watermark(self) -> WatermarkBits:
        return WatermarkBits.from_sequence(to_bits(self.wmsb + self.wlsb))

    @classmethod
    def from_watermark(cls, wm: WatermarkBits) -> "WatermarkPayload":
        if len(wm) % 16:
            raise ValueError("payload length must be two whole digests")
        raw = from_bits(wm.bits)
        half = len(raw) // 2
        return cls(raw[:half], raw[half:])

    def keyword_digest(self) -> bytes:
        return _xor(self.wmsb, self.wlsb)


def build_payload(k: str | bytes, img: GrayImage, hash_name: str = defaults.HASH_NAME) -> WatermarkPayload:
    img_digest = hash_image(img, hash_name)
    return WatermarkPayload(_xor(hash_keyword(k, hash_name), img_digest), img_digest)


def _require_capacity(img: GrayImage, params: EmbedParams, hash_name: str) -> int:
    need = 2 * digest_bits(hash_name)
    cap = capacity(img, params)
    if cap < need:
        raise CapacityError(f"capacity {cap} < {need}")
    return need


def embed_authorship(
    img: GrayImage,
    k: str | bytes,
    params: EmbedParams | None = None,
    hash_name: str = defaults.HASH_NAME,
) -> GrayImage:
    params = params or EmbedParams()
    _require_capacity(img, params, hash_name)
    return embed(img, build_payload(k, img, hash_name).to_watermark(), params)


def extract_payload(
    wimg: GrayImage, params: EmbedParams | None = None, hash_name: str = defaults.HASH_NAME
) -> WatermarkPayload:
    params = params or EmbedParams()
    need = _require_capacity(wimg, params, hash_name)
    return WatermarkPayload.from_watermark(extract(wimg, need, params))


@dataclass(frozen=True)
class VerificationReport:
    sr: float
    threshold: float
    accepted: bool
    algorithm: str
    params_echo: EmbedParams
    hash_name: str

    @property
    def low_confidence(self) -> bool:
        """Accepted only because the threshold was relaxed below the default."""
        return self.accepted and self.sr < defaults.THRESHOLD

    def fields(self) -> dict:
        return {
            "sr": self.sr,
            "threshold": self.threshold,
            "accepted": self.accepted,
            "low_confidence": self.low_confidence,
            "algorithm": self.algorithm,
            "pair_strategy": self.params_echo.pair_strategy,
            "strength_b": self.params_echo.effective_strength(),
            "hash": self.hash_name,
        }

    def to_text(self) -> str:
        return _render({"report": "verification", **self.fields()})


def _check_threshold(threshold: float) -> float:
    if not 0.0 <= threshold <= 1.0:
        raise ValueError(f"threshold must be in [0, 1], got {threshold}")
    return float(threshold)


def verify(
    wimg: GrayImage,
    claimed: str | bytes,
    params: EmbedParams | None = None,
    threshold: float = defaults.THRESHOLD,
    hash_name: str = defaults.HASH_NAME,
) -> VerificationReport:
    """Blindly check whether ``claimed`` is the keyword hidden in ``wimg``."""
    params = params or EmbedParams()
    threshold = _check_threshold(threshold)
    expected = hash_keyword(claimed, hash_name)
    payload = extract_payload(wimg, params, hash_name)
    sr = similarity_ratio(to_bits(payload.keyword_digest()), to_bits(expected)).sr
    return VerificationReport(sr, threshold, sr >= threshold, params.algorithm.value, params, hash_name)


# ---------------------------------------------------------------------------
# disputes

A_IS_AUTHOR = "A-is-author"
B_IS_AUTHOR = "B-is-author"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class DisputeRuling:
    """Outcome of a two-party authorship dispute.

    ``sr_matrix[i][j]`` is the SR of keyword j (0 = A, 1 = B) on object i.
    """

    ruling: str
    sr_matrix: tuple[tuple[float, float], tuple[float, float]]
    reason: str
    threshold: float
    params_echo: EmbedParams
    hash_name: str
    derivation: dict = field(default_factory=dict)

    def to_text(self) -> str:
        return _render(
            {
                "report": "dispute",
                "ruling": self.ruling,
                "reason": self.reason,
                "sr_matrix": [list(r) for r in self.sr_matrix],
                "threshold": self.threshold,
                "algorithm": self.params_echo.algorithm.value,
                "pair_strategy": self.params_echo.pair_strategy,
                "strength_b": self.params_echo.effective_strength(),
                "hash": self.hash_name,
                **{f"derived_{k}": v for k, v in self.derivation.items()},
            }
        )


def _derivation_sr(carried_digest: bytes, source: GrayImage, hash_name: str) -> tuple[float, str]:
    """Best SR between a carried cover digest and ``source`` or a recompression of it."""
    target = to_bits(carried_digest)
    best = (similarity_ratio(target, to_bits(hash_image(source, hash_name))).sr, "as published")
    if best[0] == 1.0:
        return best
    for qf in range(100, 0, -1):
        sr = similarity_ratio(target, to_bits(hash_image(jpeg_attack(source, qf), hash_name))).sr
        if sr > best[0]:
            best = (sr, f"after JPEG QF {qf}")
            if sr == 1.0:
                break
    return best


def resolve_dispute(
    obj_a: GrayImage,
    k_a: str | bytes,
    obj_b: GrayImage,
    k_b: str | bytes,
    params: EmbedParams | None = None,
    threshold: float = defaults.THRESHOLD,
    hash_name: str = defaults.HASH_NAME,
) -> DisputeRuling:
    """Decide which of two parties authored the disputed content.

    A wins when A's keyword verifies on A's object and B's keyword does not:
    the copy lacking B's mark shows B is not the owner.  B wins symmetrically.
    Re-embedding with the same block layout overwrites the earlier mark, so a
    re-watermarked copy satisfies B's condition as well.  That tie is broken
    by the cover digest each object carries in its W-LSB: the object whose
    cover digest matches the other object (as published or recompressed) was
    derived from it.
    """
    params = params or EmbedParams()
    threshold = _check_threshold(threshold)
    objs, keys = (obj_a, obj_b), (k_a, k_b)
    sr = tuple(
        tuple(verify(o, k, params, threshold, hash_name).sr for k in keys) for o in objs
    )

    def ruling(name, reason, derivation=None):
        return DisputeRuling(name, sr, reason, threshold, params, hash_name, derivation or {})

    if hash_keyword(k_a, hash_name) == hash_keyword(k_b, hash_name):
        return ruling(INCONCLUSIVE, "indistinguishable claims")

    ok = [[s >= threshold for s in row] for row in sr]
    a_holds = ok[0][0] and not ok[0][1]
    b_holds = ok[1][1] and not ok[1][0]
    if a_holds and not b_holds:
        return ruling(A_IS_AUTHOR, "A's mark verifies on A's object, B's does not")
    if b_holds and not a_holds:
        return ruling(B_IS_AUTHOR, "B's mark verifies on B's object, A's does not")
    if not (a_holds and b_holds):
        return ruling(INCONCLUSIVE, "neither party's claim is uniquely confirmed")

    wlsb_a = extract_payload(obj_a, params, hash_name).wlsb
    wlsb_b = extract_payload(obj_b, params, hash_name).wlsb
    b_from_a, how_b = _derivation_sr(wlsb_b, obj_a, hash_name)
    a_from_b, how_a = _derivation_sr(wlsb_a, obj_b, hash_name)
    derivation = {
        "b_from_a_sr": b_from_a,
        "b_from_a_via": how_b,
        "a_from_b_sr": a_from_b,
        "a_from_b_via": how_a,
    }
    if b_from_a >= threshold and a_from_b < threshold:
        return ruling(A_IS_AUTHOR, f"B's mark was embedded into A's object {how_b}", derivation)
    if a_from_b >= threshold and b_from_a < threshold:
        return ruling(B_IS_AUTHOR, f"A's mark was embedded into B's object {how_a}", derivation)
    return ruling(INCONCLUSIVE, "both claims verify and neither object derives from the other", derivation)


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return f"{v:.6f}"
    if isinstance(v, list):
        return "[" + ", ".join(_fmt(x) for x in v) + "]"
    return str(v)


def _render(doc: dict) -> str:
    """One ``key: value`` line per field (a flat YAML document)."""
    return "".join(f"{k}: {_fmt(v)}\n" for k, v in doc.items())
