"""Spreading codes for phase-modulated continuous-wave radar.

A transmitted burst is one period of a length-``L`` unit-modulus chip
sequence, repeated continuously.  Everything downstream (range processing,
code-domain MIMO separation) relies on the periodic autocorrelation of that
sequence, so this module provides:

* exact periodic autocorrelation (integer arithmetic for binary codes, so a
  zero sidelobe really is zero),
* verification of the "almost perfect" structure: zero everywhere except the
  in-phase peak and a negative peak at half the period,
* perfect polyphase code generation (quadratic-phase family),
* circular shifting and the per-radar shift used for code-domain MIMO,
* exhaustive search for almost-perfect binary sequences at short lengths,
* a line-oriented text file format for importing and exporting sequences.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    IndivisibleCodeError,
    IoError,
    OddLengthError,
    SearchTooLargeError,
)

__all__ = [
    "CodeSequence",
    "ApasReport",
    "periodic_autocorrelation",
    "verify_almost_perfect",
    "generate_p3",
    "circular_shift",
    "radar_code_shift",
    "search_apas",
    "load_sequence",
    "save_sequence",
]

FAMILY_APAS = "apas_binary"
FAMILY_P3 = "p3"
FAMILY_IMPORTED = "imported"

# Exhaustive search enumerates 2**L sequences; beyond this length the search
# would no longer be a desk-scale computation.
MAX_SEARCH_LENGTH = 20

_UNIT_MODULUS_TOL = 1e-9


@dataclass
class CodeSequence:
    """One period of a unit-modulus chip sequence.

    chips   complex chip values, all on the unit circle
    family  "apas_binary", "p3", or "imported"
    """

    chips: np.ndarray
    family: str = FAMILY_IMPORTED

    def __post_init__(self):
        chips = np.asarray(self.chips, dtype=np.complex128)
        if chips.ndim != 1 or chips.size < 2:
            raise ValueError("code needs at least 2 chips in a 1-D array")
        if np.max(np.abs(np.abs(chips) - 1.0)) > _UNIT_MODULUS_TOL:
            raise ValueError("chips must have unit modulus")
        self.chips = chips

    @property
    def length(self) -> int:
        return self.chips.size

    @property
    def is_binary(self) -> bool:
        """True when every chip is exactly +1 or -1."""
        return bool(
            np.all(self.chips.imag == 0.0)
            and np.all(np.abs(self.chips.real) == 1.0)
        )


@dataclass
class ApasReport:
    """Result of checking a sequence for the almost-perfect structure.

    passed           overall verdict
    peak             autocorrelation at lag 0
    half_lag_value   real part of the autocorrelation at lag L/2
    max_sidelobe     largest |autocorrelation| over all other lags
    """

    passed: bool
    peak: float
    half_lag_value: float
    max_sidelobe: float


def periodic_autocorrelation(seq: CodeSequence) -> np.ndarray:
    """Periodic (cyclic) autocorrelation of a code sequence.

    Returns a complex vector ``r`` of the same length as the code with

        r[p] = sum_l chips[l] * conj(chips[(l + p) mod L])

    so ``r[0]`` equals the code length.  Binary codes are correlated in
    integer arithmetic, which makes structurally zero sidelobes exactly
    zero rather than rounding noise.
    """
    length = seq.length
    if seq.is_binary:
        bits = seq.chips.real.astype(np.int64)
        vals = np.empty(length, dtype=np.int64)
        for lag in range(length):
            vals[lag] = np.sum(bits * np.roll(bits, -lag))
        return vals.astype(np.complex128)
    chips = seq.chips
    out = np.empty(length, dtype=np.complex128)
    for lag in range(length):
        out[lag] = np.sum(chips * np.conj(np.roll(chips, -lag)))
    return out


def verify_almost_perfect(seq: CodeSequence, tolerance: float = 0.0) -> ApasReport:
    """Check the almost-perfect autocorrelation structure.

    A sequence of even length L qualifies when its periodic autocorrelation
    is L at lag 0, has a strictly negative real value at lag L/2, and is at
    most ``tolerance`` in magnitude at every other lag.

    Raises OddLengthError for odd-length sequences: the defining negative
    peak sits at half the period, which only exists for even L.
    """
    length = seq.length
    if length % 2 != 0:
        raise OddLengthError(f"almost-perfect structure needs even length, got {length}")
    corr = periodic_autocorrelation(seq)
    half = length // 2
    others = np.abs(np.delete(corr, [0, half]))
    max_sidelobe = float(np.max(others)) if others.size else 0.0
    peak = float(corr[0].real)
    half_val = float(corr[half].real)
    passed = (
        abs(peak - length) <= max(tolerance, _UNIT_MODULUS_TOL * length)
        and half_val < 0.0
        and max_sidelobe <= tolerance
    )
    return ApasReport(
        passed=passed,
        peak=peak,
        half_lag_value=half_val,
        max_sidelobe=max_sidelobe,
    )


def generate_p3(code_length: int) -> CodeSequence:
    """Quadratic-phase polyphase code with perfect periodic autocorrelation.

    Even lengths use chip phases ``pi * l**2 / L`` (the classic P3 rule).
    The same rule is not periodic mod 2*pi for odd L, so odd lengths use the
    odd-length quadratic variant ``pi * l * (l + 1) / L``, which restores the
    perfect-autocorrelation property.  Either way every nonzero lag of the
    periodic autocorrelation is exactly a geometric sum over the L-th roots
    of unity, i.e. zero.
    """
    if code_length < 2:
        raise ValueError("code length must be at least 2")
    idx = np.arange(code_length, dtype=np.float64)
    if code_length % 2 == 0:
        phases = np.pi * idx * idx / code_length
    else:
        phases = np.pi * idx * (idx + 1.0) / code_length
    return CodeSequence(chips=np.exp(1j * phases), family=FAMILY_P3)


def circular_shift(seq: CodeSequence, shift: int) -> CodeSequence:
    """Rotate a code so that output[l] = chips[(l - shift) mod L]."""
    return CodeSequence(chips=np.roll(seq.chips, shift), family=seq.family)


def radar_code_shift(radar_index: int, n_radars: int, code_length: int) -> int:
    """Circular code shift assigned to one radar in a code-domain MIMO network.

    Radar ``m`` (1-based) of ``M`` transmits the shared code rotated by
    ``L * (m - 1) / (2 * M)`` chips.  Each radar then occupies its own
    1/M slice of the usable (half-period) range axis, which is what lets one
    receiver separate its own returns from the other radars' by range bin
    alone.

    Raises IndivisibleCodeError when 2*M does not divide L, since the shifts
    must be whole chips.
    """
    if not 1 <= radar_index <= n_radars:
        raise ValueError(f"radar index {radar_index} outside 1..{n_radars}")
    if code_length % (2 * n_radars) != 0:
        raise IndivisibleCodeError(
            f"code length {code_length} not divisible by 2*{n_radars}"
        )
    return code_length * (radar_index - 1) // (2 * n_radars)


def _canonical_binary(bits: np.ndarray) -> tuple:
    """Smallest tuple over all cyclic shifts and the global negation."""
    best = None
    for sign in (1, -1):
        s = bits * sign
        for k in range(bits.size):
            cand = tuple(np.roll(s, k).tolist())
            if best is None or cand < best:
                best = cand
    return best


def search_apas(code_length: int) -> list[CodeSequence]:
    """Exhaustively enumerate binary almost-perfect sequences of one length.

    Checks all 2**L sign patterns with exact integer autocorrelation and
    keeps those whose sidelobes are all exactly zero with a strictly
    negative lag-L/2 value.  The survivors are deduplicated up to cyclic
    shift and global negation and returned sorted by their canonical chip
    tuple, so the output order is reproducible.

    Raises OddLengthError for odd lengths and SearchTooLargeError beyond
    length 20 (the search is exponential in L).
    """
    if code_length % 2 != 0:
        raise OddLengthError(f"almost-perfect search needs even length, got {code_length}")
    if code_length > MAX_SEARCH_LENGTH:
        raise SearchTooLargeError(
            f"exhaustive search limited to length {MAX_SEARCH_LENGTH}, got {code_length}"
        )
    n_seq = 1 << code_length
    half = code_length // 2
    # All sign patterns as rows of an (2**L, L) matrix of +/-1.
    shifts = np.arange(code_length, dtype=np.uint32)
    patterns = (
        ((np.arange(n_seq, dtype=np.uint32)[:, None] >> shifts[None, :]) & 1)
        .astype(np.int16)
        * 2
        - 1
    )
    keep = np.ones(n_seq, dtype=bool)
    for lag in range(1, code_length):
        vals = np.einsum("ij,ij->i", patterns, np.roll(patterns, -lag, axis=1))
        if lag == half:
            keep &= vals < 0
        else:
            keep &= vals == 0
    survivors = patterns[keep].astype(np.int64)
    canon = {_canonical_binary(row) for row in survivors}
    return [
        CodeSequence(chips=np.array(t, dtype=np.complex128), family=FAMILY_APAS)
        for t in sorted(canon)
    ]


def save_sequence(seq: CodeSequence, path) -> None:
    """Write a code to a text file, one chip per line.

    Binary codes are written as ``+1`` / ``-1``; anything else as
    ``re,im`` pairs.  Lines starting with ``#`` are comments.
    """
    lines = [f"# code family: {seq.family}", f"# length: {seq.length}"]
    if seq.is_binary:
        lines += ["+1" if c.real > 0 else "-1" for c in seq.chips]
    else:
        lines += [f"{float(c.real)!r},{float(c.imag)!r}" for c in seq.chips]
    try:
        with open(path, "w") as fh:
            fh.write("\n".join(lines) + "\n")
    except OSError as exc:
        raise IoError(f"cannot write sequence file {path}: {exc}") from exc


def load_sequence(path) -> CodeSequence:
    """Read a code written by save_sequence (or by hand in the same format).

    The loaded sequence is tagged with the "imported" family regardless of
    any comment in the file; provenance of external codes is not trusted.
    """
    try:
        with open(path) as fh:
            raw = fh.readlines()
    except OSError as exc:
        raise IoError(f"cannot read sequence file {path}: {exc}") from exc
    chips = []
    for lineno, line in enumerate(raw, start=1):
        text = line.strip()
        if not text or text.startswith("#"):
            continue
        try:
            if "," in text:
                re_s, im_s = text.split(",")
                chips.append(complex(float(re_s), float(im_s)))
            else:
                val = int(text)
                if val not in (1, -1):
                    raise ValueError(f"binary chip must be +1 or -1, got {val}")
                chips.append(complex(val, 0.0))
        except ValueError as exc:
            raise IoError(f"{path}:{lineno}: bad chip line {text!r}: {exc}") from exc
    if len(chips) < 2:
        raise IoError(f"{path}: fewer than 2 chips")
    return CodeSequence(chips=np.array(chips, dtype=np.complex128), family=FAMILY_IMPORTED)
