"""Grayscale images, binary masks, PGM I/O, and synthetic fixtures."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence, Tuple, Union

import numpy as np

from .errors import FormatError, InvalidGeometry

MAX_INTENSITY = 65535

Rect = Tuple[int, int, int, int]  # (x0, y0, w, h) in whole pixels


@dataclass(frozen=True)
class GrayImage:
    """2D grayscale raster with physical pixel spacing.

    pixels is a (height, width) uint16 array; pixel (i, j) has its center at
    continuous coordinates (i, j). spacing is (sx, sy) in mm per pixel and
    slice_thickness the out-of-plane extent, so one pixel occupies
    sx*sy*slice_thickness mm^3.
    """

    pixels: np.ndarray
    spacing: Tuple[float, float] = (1.0, 1.0)
    slice_thickness: float = 1.0

    def __post_init__(self):
        px = np.asarray(self.pixels)
        if px.ndim != 2 or px.size == 0:
            raise ValueError("pixels must be a non-empty 2D array")
        if np.issubdtype(px.dtype, np.floating):
            raise ValueError("pixels must be integer-valued")
        if px.min() < 0 or px.max() > MAX_INTENSITY:
            raise ValueError(f"intensities must lie in [0, {MAX_INTENSITY}]")
        if self.spacing[0] <= 0 or self.spacing[1] <= 0:
            raise ValueError("spacing components must be positive")
        object.__setattr__(self, "pixels", px.astype(np.uint16))

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]


@dataclass(frozen=True)
class BinaryMask:
    """Boolean raster sharing GrayImage's geometry conventions."""

    bits: np.ndarray
    spacing: Tuple[float, float] = (1.0, 1.0)
    slice_thickness: float = 1.0

    def __post_init__(self):
        bits = np.asarray(self.bits)
        if bits.ndim != 2 or bits.size == 0:
            raise ValueError("bits must be a non-empty 2D array")
        if self.spacing[0] <= 0 or self.spacing[1] <= 0:
            raise ValueError("spacing components must be positive")
        object.__setattr__(self, "bits", bits.astype(bool))

    @property
    def width(self) -> int:
        return self.bits.shape[1]

    @property
    def height(self) -> int:
        return self.bits.shape[0]

    @property
    def count(self) -> int:
        return int(self.bits.sum())


def mask_from_image(img: GrayImage, threshold: int = 0) -> BinaryMask:
    """Threshold an image into a mask (strictly greater than threshold)."""
    return BinaryMask(img.pixels > threshold, img.spacing, img.slice_thickness)


# ---------------------------------------------------------------------------
# Binary PGM (P5). Spacing rides along in a "# spacing sx sy thick" comment.
# ---------------------------------------------------------------------------

def _header_tokens(data: bytes):
    """Yield (token, comments_seen_so_far) for the 4 PGM header fields."""
    comments = []
    i = 0
    n = len(data)
    tokens = []
    while len(tokens) < 4:
        while i < n and data[i : i + 1].isspace():
            i += 1
        if i < n and data[i : i + 1] == b"#":
            j = data.find(b"\n", i)
            if j < 0:
                j = n
            comments.append(data[i + 1 : j].decode("ascii", "replace").strip())
            i = j + 1
            continue
        if i >= n:
            raise FormatError("truncated PGM header")
        j = i
        while j < n and not data[j : j + 1].isspace():
            j += 1
        tokens.append(data[i:j])
        i = j
    if i >= n:
        raise FormatError("truncated PGM header")
    return tokens, comments, i + 1  # single whitespace byte ends the header


def load_pgm(data: bytes) -> GrayImage:
    """Decode a binary PGM (magic P5, maxval 255 or 65535)."""
    if not data.startswith(b"P5"):
        raise FormatError("not a binary PGM (magic must be P5)")
    tokens, comments, start = _header_tokens(data)
    try:
        width, height, maxval = (int(t) for t in tokens[1:4])
    except ValueError as exc:
        raise FormatError(f"bad PGM header field: {exc}") from None
    if width <= 0 or height <= 0:
        raise FormatError("PGM dimensions must be positive")
    if maxval not in (255, 65535):
        raise FormatError(f"unsupported maxval {maxval} (need 255 or 65535)")
    bytes_per = 1 if maxval == 255 else 2
    payload = data[start : start + width * height * bytes_per]
    if len(payload) != width * height * bytes_per:
        raise FormatError("truncated PGM payload")
    dtype = np.uint8 if maxval == 255 else np.dtype(">u2")
    pixels = np.frombuffer(payload, dtype=dtype).reshape(height, width)

    spacing = (1.0, 1.0)
    thickness = 1.0
    for comment in comments:
        parts = comment.split()
        if len(parts) == 4 and parts[0] == "spacing":
            try:
                sx, sy, thick = (float(p) for p in parts[1:])
            except ValueError:
                raise FormatError(f"bad spacing comment: {comment!r}") from None
            spacing, thickness = (sx, sy), thick
    return GrayImage(pixels.astype(np.uint16), spacing, thickness)


def save_pgm(img: Union[GrayImage, BinaryMask]) -> bytes:
    """Encode as binary PGM; masks are written as 0/255."""
    if isinstance(img, BinaryMask):
        pixels = np.where(img.bits, 255, 0).astype(np.uint16)
        spacing, thickness = img.spacing, img.slice_thickness
    else:
        pixels = img.pixels
        spacing, thickness = img.spacing, img.slice_thickness
    maxval = 255 if pixels.max(initial=0) <= 255 else 65535
    header = (
        f"P5\n# spacing {float(spacing[0])!r} {float(spacing[1])!r} {float(thickness)!r}\n"
        f"{pixels.shape[1]} {pixels.shape[0]}\n{maxval}\n"
    ).encode("ascii")
    if maxval == 255:
        payload = pixels.astype(np.uint8).tobytes()
    else:
        payload = pixels.astype(">u2").tobytes()
    return header + payload


# ---------------------------------------------------------------------------
# Sub-pixel sampling
# ---------------------------------------------------------------------------

def sample_intensities(img: GrayImage, points: np.ndarray, mode: str = "nearest") -> np.ndarray:
    """Sample intensities at an array of (x, y) points (shape (..., 2)).

    Out-of-bounds coordinates replicate the border. nearest rounds half up;
    bilinear blends the 4 surrounding pixel centers.
    """
    pts = np.asarray(points, dtype=np.float64)
    if pts.shape[-1] != 2:
        raise ValueError("points must have a trailing dimension of 2")
    x = pts[..., 0]
    y = pts[..., 1]
    h, w = img.pixels.shape
    if mode == "nearest":
        ix = np.clip(np.floor(x + 0.5).astype(np.int64), 0, w - 1)
        iy = np.clip(np.floor(y + 0.5).astype(np.int64), 0, h - 1)
        return img.pixels[iy, ix].astype(np.float64)
    if mode == "bilinear":
        xc = np.clip(x, 0.0, w - 1.0)
        yc = np.clip(y, 0.0, h - 1.0)
        x0 = np.floor(xc).astype(np.int64)
        y0 = np.floor(yc).astype(np.int64)
        x1 = np.minimum(x0 + 1, w - 1)
        y1 = np.minimum(y0 + 1, h - 1)
        fx = xc - x0
        fy = yc - y0
        p = img.pixels
        top = (1.0 - fx) * p[y0, x0] + fx * p[y0, x1]
        bot = (1.0 - fx) * p[y1, x0] + fx * p[y1, x1]
        return (1.0 - fy) * top + fy * bot
    raise ValueError(f"unknown sampling mode {mode!r}")


def sample_intensity(img: GrayImage, p: Sequence[float], mode: str = "nearest") -> float:
    """Scalar convenience wrapper around sample_intensities."""
    return float(sample_intensities(img, np.array([p[0], p[1]]), mode))


# ---------------------------------------------------------------------------
# Synthetic fixtures
# ---------------------------------------------------------------------------

def synth_rectangle(
    canvas_w: int,
    canvas_h: int,
    rect: Rect,
    fg: int,
    bg: int,
    erased_regions: Iterable[Rect] = (),
    noise_sigma: float = 0.0,
    rng_seed: int = 0,
    spacing: Tuple[float, float] = (1.0, 1.0),
    slice_thickness: float = 1.0,
) -> Tuple[GrayImage, BinaryMask]:
    """Filled rectangle on a flat background, with optional erased patches
    and additive Gaussian noise.

    The ground-truth mask always covers the full rectangle: erasures remove
    evidence from the image, not from the truth.
    """
    x0, y0, rw, rh = rect
    if rw <= 0 or rh <= 0 or x0 < 0 or y0 < 0 or x0 + rw > canvas_w or y0 + rh > canvas_h:
        raise InvalidGeometry(f"rect {rect} exceeds {canvas_w}x{canvas_h} canvas")
    if fg == bg:
        raise InvalidGeometry("fg and bg intensities must differ")

    pixels = np.full((canvas_h, canvas_w), bg, dtype=np.int64)
    pixels[y0 : y0 + rh, x0 : x0 + rw] = fg
    for ex, ey, ew, eh in erased_regions:
        ex0, ey0 = max(ex, 0), max(ey, 0)
        ex1, ey1 = min(ex + ew, canvas_w), min(ey + eh, canvas_h)
        if ex1 > ex0 and ey1 > ey0:
            pixels[ey0:ey1, ex0:ex1] = bg

    if noise_sigma > 0:
        rng = np.random.default_rng(rng_seed)
        noisy = pixels + rng.normal(0.0, noise_sigma, size=pixels.shape)
        pixels = np.clip(np.rint(noisy), 0, MAX_INTENSITY).astype(np.int64)

    truth = np.zeros((canvas_h, canvas_w), dtype=bool)
    truth[y0 : y0 + rh, x0 : x0 + rw] = True
    img = GrayImage(pixels.astype(np.uint16), spacing, slice_thickness)
    mask = BinaryMask(truth, spacing, slice_thickness)
    return img, mask
