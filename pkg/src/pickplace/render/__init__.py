from .images import DepthImage, ContactMask, DEPTH_SENTINEL
from .camera import VirtualCamera
from .depth import render_depth
from .contact import render_contact, measured_width
from .crop import grasp_crop, resize_bilinear
from .noise import NoiseConfig, add_depth_noise, add_mask_noise

__all__ = [
    "DepthImage", "ContactMask", "DEPTH_SENTINEL", "VirtualCamera",
    "render_depth", "render_contact", "measured_width", "grasp_crop",
    "resize_bilinear", "NoiseConfig", "add_depth_noise", "add_mask_noise",
]
