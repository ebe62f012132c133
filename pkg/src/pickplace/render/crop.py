"""Grasp-centered reoriented crops of depth images."""

import numpy as np

from .images import DEPTH_SENTINEL, DepthImage


def grasp_crop(depth_image, center_px, axis_angle_rad, crop_px):
    """Bilinear crop centered at center_px, rotated so the grasp axis is
    horizontal. Out-of-bounds pixels get the sentinel. Bilinear weights
    skip sentinel neighbors; with 3+ sentinel neighbors the nearest
    neighbor wins.
    """
    src = depth_image.depth
    h, w = src.shape
    if crop_px > min(h, w):
        raise ValueError("crop size exceeds image")
    cu, cv = float(center_px[0]), float(center_px[1])
    half = (crop_px - 1) / 2.0
    jj, ii = np.meshgrid(np.arange(crop_px, dtype=np.float64),
                         np.arange(crop_px, dtype=np.float64))
    dx = jj - half
    dy = ii - half
    ca, sa = np.cos(axis_angle_rad), np.sin(axis_angle_rad)
    su = cu + dx * ca - dy * sa
    sv = cv + dx * sa + dy * ca

    u0 = np.floor(su).astype(np.int64)
    v0 = np.floor(sv).astype(np.int64)
    fu = su - u0
    fv = sv - v0

    out = np.full((crop_px, crop_px), DEPTH_SENTINEL)
    vals = np.zeros((crop_px, crop_px, 4))
    wts = np.zeros((crop_px, crop_px, 4))
    valid_any = np.zeros((crop_px, crop_px), dtype=bool)
    sentinel_count = np.zeros((crop_px, crop_px), dtype=np.int64)
    corners = [(0, 0, (1 - fu) * (1 - fv)), (1, 0, fu * (1 - fv)),
               (0, 1, (1 - fu) * fv), (1, 1, fu * fv)]
    inside_any = np.zeros((crop_px, crop_px), dtype=bool)
    for k, (du, dv, wt) in enumerate(corners):
        uu = u0 + du
        vv = v0 + dv
        inb = (uu >= 0) & (uu < w) & (vv >= 0) & (vv < h)
        val = np.zeros_like(su)
        val[inb] = src[vv[inb], uu[inb]]
        is_sent = ~inb | (val == DEPTH_SENTINEL)
        sentinel_count += is_sent
        usable = ~is_sent
        vals[:, :, k] = np.where(usable, val, 0.0)
        wts[:, :, k] = np.where(usable, wt, 0.0)
        valid_any |= usable
        inside_any |= inb

    wsum = wts.sum(axis=2)
    blend_ok = valid_any & (sentinel_count < 3) & (wsum > 1e-12)
    with np.errstate(invalid="ignore", divide="ignore"):
        blended = (vals * wts).sum(axis=2) / wsum
    out[blend_ok] = blended[blend_ok]

    # Nearest-neighbor fallback where 3+ neighbors are sentinels.
    nn = ~blend_ok & inside_any
    if nn.any():
        un = np.clip(np.round(su[nn]).astype(np.int64), 0, w - 1)
        vn = np.clip(np.round(sv[nn]).astype(np.int64), 0, h - 1)
        out[nn] = src[vn, un]
    return DepthImage(out)


def resize_bilinear(img, out_shape):
    """Plain bilinear resize of a 2D array to out_shape = (rows, cols)."""
    src = np.asarray(img, dtype=np.float64)
    h, w = src.shape
    oh, ow = out_shape
    v = (np.arange(oh) + 0.5) * h / oh - 0.5
    u = (np.arange(ow) + 0.5) * w / ow - 0.5
    uu, vv = np.meshgrid(np.clip(u, 0, w - 1), np.clip(v, 0, h - 1))
    u0 = np.floor(uu).astype(np.int64)
    v0 = np.floor(vv).astype(np.int64)
    u1 = np.minimum(u0 + 1, w - 1)
    v1 = np.minimum(v0 + 1, h - 1)
    fu = uu - u0
    fv = vv - v0
    top = src[v0, u0] * (1 - fu) + src[v0, u1] * fu
    bot = src[v1, u0] * (1 - fu) + src[v1, u1] * fu
    return top * (1 - fv) + bot * fv
