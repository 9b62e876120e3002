"""Binary PGM (P5) pixel pictures of adjacency and weight matrices."""
from __future__ import annotations

from pathlib import Path

import numpy as np

from .core import StepDigraphon

GAP_VALUE = 128


def to_gray(values) -> np.ndarray:
    """Map [0, 1] linearly onto gray levels, 0 -> white (255) and 1 -> black (0)."""
    v = np.clip(np.asarray(values, dtype=float), 0.0, 1.0)
    return np.rint(255.0 * (1.0 - v)).astype(np.uint8)


def upscale(img: np.ndarray, scale: int) -> np.ndarray:
    scale = int(scale)
    if scale < 1:
        raise ValueError("scale must be a positive integer")
    return np.repeat(np.repeat(img, scale, axis=0), scale, axis=1)


def pgm_bytes(img: np.ndarray) -> bytes:
    img = np.ascontiguousarray(img, dtype=np.uint8)
    if img.ndim != 2:
        raise ValueError("PGM images are 2-D")
    h, w = img.shape
    return f"P5\n{w} {h}\n255\n".encode("ascii") + img.tobytes()


def write_pgm(path, img: np.ndarray, scale: int = 1) -> None:
    Path(path).write_bytes(pgm_bytes(upscale(img, scale)))


def read_pgm(path) -> np.ndarray:
    data = Path(path).read_bytes()
    parts = data.split(maxsplit=4)
    if len(parts) < 4 or parts[0] != b"P5":
        raise ValueError("not a binary PGM file")
    w, h, maxval = int(parts[1]), int(parts[2]), int(parts[3])
    if maxval != 255:
        raise ValueError("only 8-bit PGM is supported")
    pixels = data[len(data) - w * h:]
    return np.frombuffer(pixels, dtype=np.uint8).reshape(h, w)


def adjacency_image(adj, order=None) -> np.ndarray:
    a = np.asarray(adj)
    if order is not None:
        a = a[np.ix_(order, order)]
    return to_gray(a != 0)


def channel_grid(d: StepDigraphon, resolution: int = 100) -> np.ndarray:
    """(4, R, R) array: each weight channel sampled at pixel centres."""
    x = (np.arange(resolution) + 0.5) / resolution
    cls = d.class_of(x)
    w = d.weights[np.ix_(cls, cls)]
    return np.moveaxis(w, 2, 0)


def digraphon_image(d: StepDigraphon, resolution: int = 100, gap: int = 2) -> np.ndarray:
    """The four channels W00, W01, W10, W11 side by side, separated by gray strips."""
    panels = [to_gray(c) for c in channel_grid(d, resolution)]
    strip = np.full((resolution, gap), GAP_VALUE, dtype=np.uint8)
    row = []
    for t, p in enumerate(panels):
        if t:
            row.append(strip)
        row.append(p)
    return np.hstack(row)
