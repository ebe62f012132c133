"""Fixed image-space descriptors standing in for learned encoders.

Depth crops become a sentinel-masked, mean-centered 32x32 downsample;
contact masks become distance transforms downsampled to 32x24 per finger
and concatenated. Matching compares descriptors by Euclidean distance, so
the probabilistic interface stays identical if an encoder replaces these.
"""

import numpy as np
from scipy import ndimage

from ..render.crop import resize_bilinear
from ..render.images import DEPTH_SENTINEL

DEPTH_DESC_SHAPE = (32, 32)
TACTILE_DESC_SHAPE = (24, 32)   # rows (z) x cols (y) per finger
# Saturating the distance transform close to the mask keeps single stray
# pixels from rewriting the descriptor far away.
EDT_CLIP_PX = 6


def depth_descriptor(depth_image):
    """Sentinel-masked, mean-centered downsample of a depth crop."""
    src = depth_image.depth
    valid = (src != DEPTH_SENTINEL).astype(np.float64)
    vals = np.where(valid > 0, src, 0.0)
    pooled_v = resize_bilinear(vals, DEPTH_DESC_SHAPE)
    pooled_w = resize_bilinear(valid, DEPTH_DESC_SHAPE)
    ok = pooled_w > 1e-6
    if not ok.any():
        return np.zeros(DEPTH_DESC_SHAPE[0] * DEPTH_DESC_SHAPE[1], dtype=np.float32)
    cell = np.zeros(DEPTH_DESC_SHAPE)
    cell[ok] = pooled_v[ok] / pooled_w[ok]
    cell[ok] -= cell[ok].mean()
    return cell.ravel().astype(np.float32)


def _finger_descriptor(mask, mm_per_px, clip_px=EDT_CLIP_PX):
    # 3x3 majority vote knocks out most salt-and-pepper pixels.
    mask = ndimage.median_filter(np.asarray(mask, dtype=bool), size=3)
    if not mask.any():
        return np.zeros(TACTILE_DESC_SHAPE[0] * TACTILE_DESC_SHAPE[1],
                        dtype=np.float32)
    edt = ndimage.distance_transform_edt(~mask)
    edt = np.minimum(edt, clip_px) * mm_per_px
    small = resize_bilinear(edt, TACTILE_DESC_SHAPE)
    return small.ravel().astype(np.float32)


def tactile_descriptor(mask_a, mask_b, mm_per_px=0.2, clip_px=EDT_CLIP_PX):
    """Distance-transform descriptor of the two finger masks, concatenated."""
    return np.concatenate([_finger_descriptor(mask_a, mm_per_px, clip_px),
                           _finger_descriptor(mask_b, mm_per_px, clip_px)])


def build_descriptor(img, modality, mm_per_px=0.2):
    if modality == "depth":
        return depth_descriptor(img)
    if modality == "tactile":
        return tactile_descriptor(img.mask_a, img.mask_b, mm_per_px)
    raise ValueError(f"unknown modality: {modality}")


def pairwise_distances(a, b, b_norms2=None):
    """Euclidean distance matrix between descriptor rows (float64).

    b_norms2 may carry precomputed squared row norms of b, which saves a
    full pass over large descriptor matrices in hot loops.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    aa = (a * a).sum(axis=1)[:, None]
    if b_norms2 is None:
        b_norms2 = (b * b).sum(axis=1)
    sq = aa + b_norms2[None, :] - 2.0 * (a @ b.T)
    return np.sqrt(np.maximum(sq, 0.0))
