"""HTTP/JSON backend for the interactive seed-placement frontend.

Endpoints:
  POST /images                raw PGM or grayscale-PNG bytes -> {id, width, height}
  POST /segment               segmentation request -> contour/boundary/mask RLE
  GET  /images/{id}/pixels    8-bit row-major bytes with X-Width/X-Height headers

The store is in-memory, content-addressed, and LRU-bounded; nothing persists
across restarts.
"""

from __future__ import annotations

import argparse
import hashlib
import io
import threading
from collections import OrderedDict
from typing import Optional, Tuple

import numpy as np
from fastapi import FastAPI, HTTPException, Request, Response
from pydantic import BaseModel

from . import pipeline
from .errors import FormatError, SeedOutOfImage, SquareCutError
from .geometry import Point2, square_template
from .imaging import BinaryMask, GrayImage, load_pgm
from .maxflow import warmup
from .segcore import SegParams

DEFAULT_LISTEN = "127.0.0.1:8071"
DEFAULT_STORE_CAP = 32
DEFAULT_MAX_BYTES = 16 * 1024 * 1024


class ImageStore:
    """Content-addressed LRU store of uploaded images."""

    def __init__(self, capacity: int = DEFAULT_STORE_CAP):
        self.capacity = capacity
        self._lock = threading.Lock()
        self._images: "OrderedDict[str, GrayImage]" = OrderedDict()

    def put(self, data: bytes, img: GrayImage) -> str:
        image_id = hashlib.sha256(data).hexdigest()[:16]
        with self._lock:
            if image_id in self._images:
                self._images.move_to_end(image_id)
            else:
                self._images[image_id] = img
                while len(self._images) > self.capacity:
                    self._images.popitem(last=False)
        return image_id

    def get(self, image_id: str) -> Optional[GrayImage]:
        with self._lock:
            img = self._images.get(image_id)
            if img is not None:
                self._images.move_to_end(image_id)
            return img


def decode_upload(data: bytes) -> GrayImage:
    """Accept binary PGM or grayscale PNG payloads."""
    if data.startswith(b"P5"):
        return load_pgm(data)
    if data.startswith(b"\x89PNG"):
        from PIL import Image, UnidentifiedImageError

        try:
            im = Image.open(io.BytesIO(data))
            im.load()
        except (UnidentifiedImageError, OSError) as exc:
            raise FormatError(f"undecodable PNG: {exc}") from None
        if im.mode in ("L", "I;16", "I"):
            arr = np.asarray(im)
            if arr.dtype.kind not in "ui":
                raise FormatError(f"unsupported PNG pixel type {arr.dtype}")
            if arr.max(initial=0) > 65535 or arr.min(initial=0) < 0:
                raise FormatError("PNG intensities out of range")
            return GrayImage(arr.astype(np.uint16))
        raise FormatError(f"PNG must be grayscale, got mode {im.mode}")
    raise FormatError("payload is neither PGM (P5) nor PNG")


def mask_rle(mask: BinaryMask) -> list[int]:
    """Row-major run lengths alternating off/on, starting with an off run."""
    flat = mask.bits.ravel()
    if flat.size == 0:
        return []
    changes = np.flatnonzero(np.diff(flat)) + 1
    bounds = np.concatenate([[0], changes, [flat.size]])
    runs = np.diff(bounds).tolist()
    if flat[0]:
        runs.insert(0, 0)
    return [int(r) for r in runs]


class SeedBody(BaseModel):
    x: float
    y: float


class SegmentBody(BaseModel):
    image_id: str
    seed: SeedBody
    rays: int
    nodes: int
    delta: int
    radius: float
    patch: int = 5
    smooth_iters: int = 1


def create_app(
    store_capacity: int = DEFAULT_STORE_CAP,
    max_bytes: int = DEFAULT_MAX_BYTES,
    static_dir: Optional[str] = None,
) -> FastAPI:
    app = FastAPI(title="squarecut")
    store = ImageStore(store_capacity)
    app.state.store = store

    @app.on_event("startup")
    def _warm():
        warmup()  # JIT compile the solver before the first request

    @app.post("/images")
    async def upload_image(request: Request):
        data = await request.body()
        if len(data) > max_bytes:
            raise HTTPException(status_code=413, detail={"error": "too_large"})
        try:
            img = decode_upload(data)
        except FormatError as exc:
            raise HTTPException(status_code=400, detail={"error": "malformed_image",
                                                         "message": str(exc)})
        image_id = store.put(data, img)
        return {"id": image_id, "width": img.width, "height": img.height}

    @app.post("/segment")
    def segment_image(body: SegmentBody):
        img = store.get(body.image_id)
        if img is None:
            raise HTTPException(status_code=404, detail={"error": "unknown_image"})
        try:
            params = SegParams(
                rays=body.rays,
                nodes_per_ray=body.nodes,
                delta=body.delta,
                radius_scale=body.radius,
                patch_size=body.patch,
                smoothing_iterations=body.smooth_iters,
                template=square_template(),
            )
        except ValueError as exc:
            raise HTTPException(status_code=422, detail={"error": "invalid_params",
                                                         "message": str(exc)})
        try:
            res = pipeline.segment(img, Point2(body.seed.x, body.seed.y), params)
        except SeedOutOfImage:
            raise HTTPException(status_code=422, detail={"error": "seed_out_of_image"})
        except SquareCutError as exc:
            raise HTTPException(status_code=500, detail={"error": "solver_failure",
                                                         "message": str(exc)})
        return {
            "contour": [{"x": float(x), "y": float(y)} for x, y in res.contour_smoothed.points],
            "boundary": [int(b) for b in res.boundary],
            "mask_rle": mask_rle(res.mask),
            "cut_cost": res.cut_cost,
            "timings_ms": res.timings_ms,
        }

    @app.get("/images/{image_id}/pixels")
    def image_pixels(image_id: str):
        img = store.get(image_id)
        if img is None:
            raise HTTPException(status_code=404, detail={"error": "unknown_image"})
        pixels = img.pixels
        peak = int(pixels.max(initial=0))
        if peak > 255:
            scaled = np.floor(pixels.astype(np.float64) * 255.0 / peak + 0.5)
            payload = scaled.astype(np.uint8).tobytes()
        else:
            payload = pixels.astype(np.uint8).tobytes()
        return Response(
            content=payload,
            media_type="application/octet-stream",
            headers={"X-Width": str(img.width), "X-Height": str(img.height)},
        )

    if static_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=static_dir, html=True), name="static")
    return app


def _parse_listen(text: str) -> Tuple[str, int]:
    host, _, port = text.rpartition(":")
    return host or "127.0.0.1", int(port)


def main(argv=None) -> int:
    import uvicorn

    parser = argparse.ArgumentParser(prog="squarecut-service")
    parser.add_argument("--listen", default=DEFAULT_LISTEN, help="host:port")
    parser.add_argument("--static-dir", default=None,
                        help="serve frontend assets from this directory")
    parser.add_argument("--max-images", type=int, default=DEFAULT_STORE_CAP)
    args = parser.parse_args(argv)
    host, port = _parse_listen(args.listen)
    app = create_app(store_capacity=args.max_images, static_dir=args.static_dir)
    uvicorn.run(app, host=host, port=port, log_level="warning")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
