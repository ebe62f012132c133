"""Seeded sensor noise for desk-scale robustness experiments.

A zero-valued config is the identity (bitwise). All randomness comes from
a counter-based generator keyed on the given seed.
"""

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .images import DEPTH_SENTINEL, DepthImage


@dataclass
class NoiseConfig:
    depth_sigma_mm: float = 0.0
    dropout_rate: float = 0.0
    mask_flip_rate: float = 0.0
    erode_px: int = 0
    dilate_px: int = 0

    def is_identity(self):
        return (self.depth_sigma_mm == 0.0 and self.dropout_rate == 0.0
                and self.mask_flip_rate == 0.0 and self.erode_px == 0
                and self.dilate_px == 0)

    def to_dict(self):
        return {
            "depth_sigma_mm": self.depth_sigma_mm,
            "dropout_rate": self.dropout_rate,
            "mask_flip_rate": self.mask_flip_rate,
            "erode_px": self.erode_px,
            "dilate_px": self.dilate_px,
        }

    @staticmethod
    def from_dict(d):
        return NoiseConfig(**d)


def _disk(radius):
    r = int(radius)
    yy, xx = np.mgrid[-r:r + 1, -r:r + 1]
    return xx * xx + yy * yy <= r * r


def add_depth_noise(img, cfg, seed):
    if cfg.depth_sigma_mm == 0.0 and cfg.dropout_rate == 0.0:
        return img.copy()
    rng = np.random.Generator(np.random.Philox(seed))
    depth = img.depth.copy()
    valid = depth != DEPTH_SENTINEL
    if cfg.depth_sigma_mm > 0.0:
        noise = rng.normal(0.0, cfg.depth_sigma_mm, size=depth.shape)
        depth[valid] = np.maximum(depth[valid] + noise[valid], 1e-6)
    if cfg.dropout_rate > 0.0:
        drop = rng.random(depth.shape) < cfg.dropout_rate
        depth[drop & valid] = DEPTH_SENTINEL
    return DepthImage(depth)


def add_mask_noise(mask, cfg, seed):
    """Morphology first (systematic sensor bias on the clean mask), pixel
    flips last: eroding after flipping would blow every stray off-pixel
    up to a hole of the structuring-element size."""
    if cfg.mask_flip_rate == 0.0 and cfg.erode_px == 0 and cfg.dilate_px == 0:
        return mask.copy()
    rng = np.random.Generator(np.random.Philox(seed))
    out = np.asarray(mask, dtype=bool).copy()
    if cfg.erode_px > 0:
        out = ndimage.binary_erosion(out, structure=_disk(cfg.erode_px))
    if cfg.dilate_px > 0:
        out = ndimage.binary_dilation(out, structure=_disk(cfg.dilate_px))
    if cfg.mask_flip_rate > 0.0:
        flips = rng.random(out.shape) < cfg.mask_flip_rate
        out ^= flips
    return out
