"""Depth images and binary contact masks, with their PNG persistence.

Depth PNGs are 16-bit grayscale at 0.05 mm per unit (fixed point), masks
are 1-bit PNGs. The sentinel for no-hit pixels is 0.0 mm, which maps to
PNG value 0.
"""

from dataclasses import dataclass

import numpy as np
from PIL import Image

DEPTH_SENTINEL = 0.0
DEPTH_MM_PER_UNIT = 0.05


@dataclass
class DepthImage:
    depth: np.ndarray    # (H, W) float64, mm; DEPTH_SENTINEL where no hit

    def __post_init__(self):
        self.depth = np.asarray(self.depth, dtype=np.float64)

    @property
    def resolution(self):
        h, w = self.depth.shape
        return (w, h)

    @property
    def valid(self):
        return self.depth != DEPTH_SENTINEL

    def copy(self):
        return DepthImage(self.depth.copy())

    def save_png(self, path):
        units = np.round(self.depth / DEPTH_MM_PER_UNIT)
        units = np.clip(units, 0, 65535).astype(np.uint16)
        Image.fromarray(units).save(path)

    @staticmethod
    def load_png(path):
        img = Image.open(path)
        arr = np.asarray(img, dtype=np.uint16).astype(np.float64)
        return DepthImage(arr * DEPTH_MM_PER_UNIT)


@dataclass
class ContactMask:
    mask_a: np.ndarray   # (H, W) bool, finger A
    mask_b: np.ndarray   # (H, W) bool, finger B

    def __post_init__(self):
        self.mask_a = np.asarray(self.mask_a, dtype=bool)
        self.mask_b = np.asarray(self.mask_b, dtype=bool)
        if self.mask_a.shape != self.mask_b.shape:
            raise ValueError("finger masks must share a resolution")

    @property
    def resolution(self):
        h, w = self.mask_a.shape
        return (w, h)


def save_mask_png(mask, path):
    Image.fromarray(mask.astype(np.uint8) * 255, mode="L").convert("1").save(path)


def load_mask_png(path):
    return np.asarray(Image.open(path).convert("1"), dtype=bool)
