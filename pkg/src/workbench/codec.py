"""Toy lossy codec: 8x8 block DCT, quantize, reconstruct.

Luma/chroma separation with 2x2 chroma subsampling below quality 90;
high qualities keep full chroma so quality 100 stays near-lossless.
The codec exists to make compression artifacts reproducible, not to
emit an interchange bitstream.
"""

from __future__ import annotations

import numpy as np

from .images import ImageError

BLOCK = 8

# Base quantization tables (luma / chroma), scaled by quality.
LUMA_Q = np.array(
    [
        [16, 11, 10, 16, 24, 40, 51, 61],
        [12, 12, 14, 19, 26, 58, 60, 55],
        [14, 13, 16, 24, 40, 57, 69, 56],
        [14, 17, 22, 29, 51, 87, 80, 62],
        [18, 22, 37, 56, 68, 109, 103, 77],
        [24, 35, 55, 64, 81, 104, 113, 92],
        [49, 64, 78, 87, 103, 121, 120, 101],
        [72, 92, 95, 98, 112, 100, 103, 99],
    ],
    dtype=np.float64,
)
CHROMA_Q = np.array(
    [
        [17, 18, 24, 47, 99, 99, 99, 99],
        [18, 21, 26, 66, 99, 99, 99, 99],
        [24, 26, 56, 99, 99, 99, 99, 99],
        [47, 66, 99, 99, 99, 99, 99, 99],
        [99, 99, 99, 99, 99, 99, 99, 99],
        [99, 99, 99, 99, 99, 99, 99, 99],
        [99, 99, 99, 99, 99, 99, 99, 99],
        [99, 99, 99, 99, 99, 99, 99, 99],
    ],
    dtype=np.float64,
)

FULL_CHROMA_QUALITY = 90  # 4:4:4 at and above this quality


def _dct_basis() -> np.ndarray:
    n = BLOCK
    k = np.arange(n)
    basis = np.cos(np.pi * (2 * k[None, :] + 1) * k[:, None] / (2 * n))
    basis *= np.sqrt(2.0 / n)
    basis[0] /= np.sqrt(2.0)
    return basis


_BASIS = _dct_basis()  # orthonormal: _BASIS @ _BASIS.T == I


def dct2(block: np.ndarray) -> np.ndarray:
    return _BASIS @ block @ _BASIS.T


def idct2(coef: np.ndarray) -> np.ndarray:
    return _BASIS.T @ coef @ _BASIS


def quality_scaled_table(base: np.ndarray, quality: int) -> np.ndarray:
    if not 1 <= quality <= 100:
        raise ImageError(f"quality {quality} outside 1..100")
    if quality == 100:
        return np.ones_like(base)
    s = 5000.0 / quality if quality < 50 else 200.0 - 2.0 * quality
    table = np.floor((base * s + 50.0) / 100.0)
    return np.clip(table, 1.0, 255.0)


def _pad_to_blocks(plane: np.ndarray) -> np.ndarray:
    h, w = plane.shape
    ph = (-h) % BLOCK
    pw = (-w) % BLOCK
    if ph or pw:
        plane = np.pad(plane, ((0, ph), (0, pw)), mode="edge")
    return plane


def _code_plane(plane: np.ndarray, table: np.ndarray, quantize: bool = True) -> np.ndarray:
    h, w = plane.shape
    padded = _pad_to_blocks(plane - 128.0)
    ph, pw = padded.shape
    blocks = padded.reshape(ph // BLOCK, BLOCK, pw // BLOCK, BLOCK).transpose(0, 2, 1, 3)
    coefs = np.einsum("ij,abjk,lk->abil", _BASIS, blocks, _BASIS)
    if quantize:
        coefs = np.round(coefs / table) * table
    recon = np.einsum("ji,abjk,kl->abil", _BASIS, coefs, _BASIS)
    out = recon.transpose(0, 2, 1, 3).reshape(ph, pw)[:h, :w]
    return out + 128.0


# BT.601 luma weights; the chroma transform is derived from them so the
# forward/inverse pair is exactly invertible in float.
_KR, _KG, _KB = 0.299, 0.587, 0.114


def rgb_to_ycbcr(rgb: np.ndarray) -> np.ndarray:
    r, g, b = rgb[..., 0], rgb[..., 1], rgb[..., 2]
    y = _KR * r + _KG * g + _KB * b
    cb = 128.0 + (b - y) * (0.5 / (1.0 - _KB))
    cr = 128.0 + (r - y) * (0.5 / (1.0 - _KR))
    return np.stack([y, cb, cr], axis=2)


def ycbcr_to_rgb(ycc: np.ndarray) -> np.ndarray:
    y, cb, cr = ycc[..., 0], ycc[..., 1] - 128.0, ycc[..., 2] - 128.0
    r = y + cr * (2.0 * (1.0 - _KR))
    b = y + cb * (2.0 * (1.0 - _KB))
    g = (y - _KR * r - _KB * b) / _KG
    return np.stack([r, g, b], axis=2)


def _subsample2(plane: np.ndarray) -> np.ndarray:
    p = plane
    if p.shape[0] % 2:
        p = np.pad(p, ((0, 1), (0, 0)), mode="edge")
    if p.shape[1] % 2:
        p = np.pad(p, ((0, 0), (0, 1)), mode="edge")
    return (p[0::2, 0::2] + p[0::2, 1::2] + p[1::2, 0::2] + p[1::2, 1::2]) / 4.0


def _upsample2(plane: np.ndarray, h: int, w: int) -> np.ndarray:
    return np.repeat(np.repeat(plane, 2, axis=0), 2, axis=1)[:h, :w]


def compress_array(rgb: np.ndarray, quality: int) -> np.ndarray:
    """Encode-decode an (h, w, 3) uint8 image through the block codec."""
    if rgb.ndim != 3 or rgb.shape[2] != 3:
        raise ImageError(f"codec expects (h, w, 3), got {rgb.shape}")
    h, w = rgb.shape[:2]
    ycc = rgb_to_ycbcr(rgb.astype(np.float64))
    luma_t = quality_scaled_table(LUMA_Q, quality)
    chroma_t = quality_scaled_table(CHROMA_Q, quality)
    # At quality 100 the table is flat ones and coefficients stay real-
    # valued, so the only loss left is the final pixel rounding (<= 1 DN).
    quantize = quality < 100
    y = _code_plane(ycc[:, :, 0], luma_t, quantize)
    if quality >= FULL_CHROMA_QUALITY:
        cb = _code_plane(ycc[:, :, 1], chroma_t, quantize)
        cr = _code_plane(ycc[:, :, 2], chroma_t, quantize)
    else:
        cb = _upsample2(_code_plane(_subsample2(ycc[:, :, 1]), chroma_t, quantize), h, w)
        cr = _upsample2(_code_plane(_subsample2(ycc[:, :, 2]), chroma_t, quantize), h, w)
    out = ycbcr_to_rgb(np.stack([y, cb, cr], axis=2))
    return np.clip(np.round(out), 0, 255).astype(np.uint8)
