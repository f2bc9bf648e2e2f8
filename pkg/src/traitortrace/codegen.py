"""Fingerprinting-code generation.

The secret per-position biases follow the arcsine density
1/(pi*sqrt(p*(1-p))) on (0,1); user codewords are column vectors of i.i.d.
Bernoulli(p_i) bits.  Both objects serialize to a small deterministic binary
container so that runs can be reproduced byte-for-byte.
"""

import json
from dataclasses import dataclass

import numpy as np

# Nearest representable interior probabilities; downstream scores divide by
# p and 1-p, so exact 0/1 from floating underflow must never escape.
_P_MIN = np.nextafter(0.0, 1.0)
_P_MAX = np.nextafter(1.0, 0.0)

_MAGIC_BIAS = b"TTFP1 bias\n"
_MAGIC_CODE = b"TTFP1 code\n"


def arcsine_cdf(p):
    """Distribution function of the arcsine bias density: F(p) = (2/pi) asin(sqrt(p)).

    Accepts a scalar or array in [0, 1]; raises ValueError outside.
    """
    arr = np.asarray(p, dtype=np.float64)
    if arr.size and (np.min(arr) < 0.0 or np.max(arr) > 1.0):
        raise ValueError("arcsine_cdf: argument must lie in [0, 1]")
    out = (2.0 / np.pi) * np.arcsin(np.sqrt(arr))
    return float(out) if np.ndim(p) == 0 else out


def arcsine_ppf(u):
    """Quantile function of the arcsine density: p = sin^2(pi*u/2)."""
    arr = np.asarray(u, dtype=np.float64)
    if arr.size and (np.min(arr) < 0.0 or np.max(arr) > 1.0):
        raise ValueError("arcsine_ppf: argument must lie in [0, 1]")
    out = np.sin(0.5 * np.pi * arr) ** 2
    return float(out) if np.ndim(u) == 0 else out


@dataclass(frozen=True)
class BiasVector:
    """Secret Bernoulli parameters, one per code position.

    All entries are strictly inside (0, 1); with a nonzero cutoff t they lie
    in [t, 1-t].  Immutable after construction.
    """

    p: np.ndarray
    cutoff: float = 0.0

    def __post_init__(self):
        p = np.asarray(self.p, dtype=np.float64)
        if p.ndim != 1 or p.size < 1:
            raise ValueError("BiasVector: p must be a non-empty 1-D array")
        if not 0.0 <= self.cutoff < 0.5:
            raise ValueError("BiasVector: cutoff must lie in [0, 0.5)")
        lo = max(self.cutoff, _P_MIN)
        hi = min(1.0 - self.cutoff, _P_MAX)
        if np.min(p) < lo or np.max(p) > hi:
            raise ValueError("BiasVector: entries must lie strictly inside the unit interval")
        p.setflags(write=False)
        object.__setattr__(self, "p", p)

    @property
    def m(self):
        return self.p.size


@dataclass(frozen=True)
class CodeMatrix:
    """Binary code: bits[i, j] is the symbol of user j at position i."""

    bits: np.ndarray

    def __post_init__(self):
        bits = np.ascontiguousarray(self.bits, dtype=np.uint8)
        if bits.ndim != 2:
            raise ValueError("CodeMatrix: bits must be an m x n matrix")
        if bits.size and np.max(bits) > 1:
            raise ValueError("CodeMatrix: entries must be 0 or 1")
        bits.setflags(write=False)
        object.__setattr__(self, "bits", bits)

    @property
    def m(self):
        return self.bits.shape[0]

    @property
    def n(self):
        return self.bits.shape[1]


def sample_bias_vector(m, rng, cutoff=0.0):
    """Draw m i.i.d. biases from the arcsine density via the inverse CDF.

    The transform is p = sin^2(pi*U/2) with U uniform on
    (F(cutoff), F(1-cutoff)); exact and branch-free.  Deterministic given
    the generator state.
    """
    if m < 1:
        raise ValueError("sample_bias_vector: m must be >= 1")
    if not 0.0 <= cutoff < 0.5:
        raise ValueError("sample_bias_vector: cutoff must lie in [0, 0.5)")
    lo = arcsine_cdf(cutoff)
    hi = arcsine_cdf(1.0 - cutoff)
    u = lo + (hi - lo) * rng.random(int(m))
    p = np.sin(0.5 * np.pi * u) ** 2
    np.clip(p, max(cutoff, _P_MIN), min(1.0 - cutoff, _P_MAX), out=p)
    return BiasVector(p, cutoff)


def generate_code(bias, n, rng):
    """Draw the m x n code, bits[i, j] ~ Bernoulli(p_i) independently.

    `bias` may be a BiasVector or a raw probability array (test fixtures use
    raw arrays to force degenerate p without tripping BiasVector validation).
    """
    if n < 2:
        raise ValueError("generate_code: n must be >= 2")
    p = np.asarray(getattr(bias, "p", bias), dtype=np.float64)
    bits = (rng.random((p.size, int(n))) < p[:, None]).astype(np.uint8)
    return CodeMatrix(bits)


def _header_bytes(fields):
    return json.dumps(fields, sort_keys=True, separators=(",", ":")).encode() + b"\n"


def _read_container(path, magic):
    with open(path, "rb") as fh:
        got = fh.read(len(magic))
        if got != magic:
            raise ValueError(f"{path}: bad magic, expected {magic!r}")
        header = json.loads(fh.readline())
        payload = fh.read()
    return header, payload


def save_bias(path, bias, seed=None):
    """Write a BiasVector: magic, JSON header {m, cutoff, seed}, float64-LE payload."""
    header = {"m": int(bias.m), "cutoff": float(bias.cutoff), "seed": seed}
    with open(path, "wb") as fh:
        fh.write(_MAGIC_BIAS)
        fh.write(_header_bytes(header))
        fh.write(bias.p.astype("<f8").tobytes())


def load_bias(path):
    header, payload = _read_container(path, _MAGIC_BIAS)
    p = np.frombuffer(payload, dtype="<f8", count=header["m"])
    return BiasVector(p.copy(), header["cutoff"])


def save_code(path, code, seed=None):
    """Write a CodeMatrix: magic, JSON header {m, n, seed}, row-major packed bits.

    Bits are packed MSB-first (numpy.packbits default), padded with zeros to
    a whole number of bytes.
    """
    header = {"m": int(code.m), "n": int(code.n), "seed": seed}
    with open(path, "wb") as fh:
        fh.write(_MAGIC_CODE)
        fh.write(_header_bytes(header))
        fh.write(np.packbits(code.bits.ravel()).tobytes())


def load_code(path):
    header, payload = _read_container(path, _MAGIC_CODE)
    m, n = header["m"], header["n"]
    bits = np.unpackbits(np.frombuffer(payload, dtype=np.uint8), count=m * n)
    return CodeMatrix(bits.reshape(m, n))
