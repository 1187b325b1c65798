"""Minimal PGM (P2 ASCII / P5 binary) reader and writer."""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass

import numpy as np

from .core import PDSplitError

_WS = b" \t\n\r\x0b\x0c"
SAVE_MAXVALS = (255, 65535)


class PGMError(PDSplitError, ValueError):
    def __init__(self, message: str, offset: int):
        self.offset = offset
        super().__init__(f"{message} (byte offset {offset})")


@dataclass(frozen=True)
class ImageFile:
    """Raw samples of a grayscale image, row-major, shape ``(height, width)``."""

    width: int
    height: int
    maxval: int
    pixels: np.ndarray

    def to_array(self) -> np.ndarray:
        """Samples scaled to ``[0, 1]``."""
        return self.pixels.astype(float) / self.maxval

    @classmethod
    def from_array(cls, arr, maxval: int = 255) -> "ImageFile":
        """Quantize ``[0, 1]`` intensities with round-half-up; values outside are clipped."""
        if maxval not in SAVE_MAXVALS:
            raise ValueError(f"maxval must be one of {SAVE_MAXVALS}")
        a = np.asarray(arr, dtype=float)
        if a.ndim != 2:
            raise ValueError("image must be 2-D")
        q = np.floor(np.clip(a, 0.0, 1.0) * maxval + 0.5).astype(np.int64)
        q = np.clip(q, 0, maxval)
        return cls(width=a.shape[1], height=a.shape[0], maxval=maxval, pixels=q)


def _tokens(data: bytes, count: int, pos: int):
    """Read ``count`` whitespace-separated header tokens, skipping ``#`` comments."""
    out = []
    n = len(data)
    while len(out) < count:
        while pos < n and (data[pos] in _WS or data[pos] == ord("#")):
            if data[pos] == ord("#"):
                while pos < n and data[pos] not in b"\r\n":
                    pos += 1
            else:
                pos += 1
        if pos >= n:
            raise PGMError("truncated header", pos)
        start = pos
        while pos < n and data[pos] not in _WS and data[pos] != ord("#"):
            pos += 1
        out.append((data[start:pos], start))
    return out, pos


def _int_token(tok, what):
    raw, off = tok
    if not raw.isdigit():
        raise PGMError(f"invalid {what} {raw!r}", off)
    return int(raw)


def parse_pgm(data: bytes) -> ImageFile:
    if len(data) < 2:
        raise PGMError("file too short", 0)
    magic = data[:2]
    if magic not in (b"P2", b"P5"):
        raise PGMError(f"unsupported magic number {magic!r}", 0)
    toks, pos = _tokens(data, 3, 2)
    width = _int_token(toks[0], "width")
    height = _int_token(toks[1], "height")
    maxval = _int_token(toks[2], "maxval")
    if width == 0 or height == 0:
        raise PGMError("zero image dimension", toks[0][1])
    if not 0 < maxval < 65536:
        raise PGMError(f"maxval {maxval} outside 1..65535", toks[2][1])
    count = width * height
    if magic == b"P5":
        if pos >= len(data) or data[pos] not in _WS:
            raise PGMError("missing whitespace after maxval", pos)
        pos += 1
        nbytes = 1 if maxval < 256 else 2
        need = count * nbytes
        if len(data) - pos < need:
            raise PGMError(f"truncated raster: need {need} bytes, have {len(data) - pos}", len(data))
        dtype = np.uint8 if nbytes == 1 else np.dtype(">u2")
        pixels = np.frombuffer(data, dtype=dtype, count=count, offset=pos).astype(np.int64)
        bad = np.flatnonzero(pixels > maxval)
        if bad.size:
            raise PGMError("sample exceeds maxval", pos + int(bad[0]) * nbytes)
    else:
        matches = list(itertools.islice(re.finditer(rb"\S+", data[pos:]), count))
        if len(matches) < count:
            raise PGMError(f"truncated raster: need {count} samples, have {len(matches)}", len(data))
        pixels = np.empty(count, dtype=np.int64)
        for k, m in enumerate(matches):
            tok = m.group()
            if not tok.isdigit():
                raise PGMError(f"non-integer sample {tok!r} in ASCII raster", pos + m.start())
            pixels[k] = int(tok)
            if pixels[k] > maxval:
                raise PGMError("sample exceeds maxval", pos + m.start())
    return ImageFile(width, height, maxval, pixels.reshape(height, width))


def load_pgm(path) -> ImageFile:
    with open(path, "rb") as fh:
        return parse_pgm(fh.read())


def format_pgm(img: ImageFile, binary: bool = True) -> bytes:
    if img.maxval not in SAVE_MAXVALS:
        raise ValueError(f"maxval must be one of {SAVE_MAXVALS}")
    px = np.asarray(img.pixels, dtype=np.int64).reshape(img.height, img.width)
    if px.min(initial=0) < 0 or px.max(initial=0) > img.maxval:
        raise ValueError("samples outside [0, maxval]")
    magic = b"P5" if binary else b"P2"
    header = b"%s\n%d %d\n%d\n" % (magic, img.width, img.height, img.maxval)
    if binary:
        dtype = np.uint8 if img.maxval < 256 else np.dtype(">u2")
        return header + px.astype(dtype).tobytes()
    lines = [" ".join(str(int(v)) for v in row) for row in px]
    return header + ("\n".join(lines) + "\n").encode("ascii")


def save_pgm(path, img: ImageFile, binary: bool = True) -> None:
    with open(path, "wb") as fh:
        fh.write(format_pgm(img, binary))


def read_image(path) -> np.ndarray:
    """Load a PGM file as a float array in ``[0, 1]``."""
    return load_pgm(path).to_array()


def write_image(path, arr, maxval: int = 255) -> None:
    save_pgm(path, ImageFile.from_array(arr, maxval))
