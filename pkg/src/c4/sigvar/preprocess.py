"""Signature normalization: Otsu segmentation, center-of-mass placement on
a canvas, inversion, resize and center crop."""

import math
from fractions import Fraction
from itertools import accumulate

import numpy as np
from PIL import Image

from .image import SignatureImage, Polarity
from . import util
from . import err


RESIZED = (170, 242)
CROPPED = (150, 220)

_BILINEAR = getattr(Image, 'Resampling', Image).BILINEAR


def histogram(img):
    pixels = img.pixels if isinstance(img, SignatureImage) else np.asarray(img)
    return [int(c) for c in np.bincount(pixels.ravel(), minlength=256)]


def between_class_variances(hist):
    """exact between-class variance, times the squared pixel count, of
    every split {intensity < t} / {intensity >= t}, t in [0, 255]"""
    counts = [0] + list(accumulate(hist))
    sums = [0] + list(accumulate(h * i for i, h in enumerate(hist)))
    n, s = counts[-1], sums[-1]
    out = []
    for t in range(256):
        n0, s0 = counts[t], sums[t]
        n1, s1 = n - n0, s - s0
        if n0 == 0 or n1 == 0:
            out.append(Fraction(0))
        else:
            out.append(Fraction((s0 * n1 - s1 * n0) ** 2, n0 * n1))
    return out


def otsu_threshold(img):
    """returns (t, degenerate). t maximizes the between-class variance,
    the lowest t winning ties; foreground is intensity < t for ink-dark
    images. A constant image gives (0, True)."""
    hist = histogram(img)
    if sum(hist) == 0:
        raise err.ImageSizeError("a non-empty image", (0, 0))
    var = between_class_variances(hist)
    best_t = max(range(256), key=lambda t: (var[t], -t))
    if var[best_t] == 0:
        return 0, True
    return best_t, False


def segment(img):
    """keep the grayscale of ink pixels, set the background to 255"""
    if img.polarity != Polarity.INK_DARK:
        raise err.PolarityError(Polarity.INK_DARK.value, img.polarity.value)
    t, degenerate = otsu_threshold(img)
    if degenerate:
        util.logwarn("otsu: constant image, nothing to segment")
        raise err.EmptySignature()
    fg = img.pixels < t
    if not fg.any():
        raise err.EmptySignature()
    return SignatureImage(np.where(fg, img.pixels, 255).astype(np.uint8), Polarity.INK_DARK)


def center_of_mass(img):
    """(row, col) ink-weighted center of mass"""
    w = img.ink()
    total = w.sum()
    if total == 0:
        raise err.EmptySignature()
    rows = np.arange(w.shape[0], dtype=np.float64)
    cols = np.arange(w.shape[1], dtype=np.float64)
    return float(w.sum(axis=1) @ rows / total), float(w.sum(axis=0) @ cols / total)


def center_on_canvas(img, canvas):
    """place img on a blank (height, width) canvas, its center of mass on
    the canvas center. Content falling off the canvas is clipped."""
    ch, cw = int(canvas[0]), int(canvas[1])
    cy, cx = center_of_mass(img)
    dy = int(math.floor(ch / 2. - cy))
    dx = int(math.floor(cw / 2. - cx))
    out = np.full((ch, cw), img.background, dtype=np.uint8)
    # source window landing inside the canvas
    y0, x0 = max(0, -dy), max(0, -dx)
    y1, x1 = min(img.height, ch - dy), min(img.width, cw - dx)
    if y1 > y0 and x1 > x0:
        out[y0 + dy:y1 + dy, x0 + dx:x1 + dx] = img.pixels[y0:y1, x0:x1]
    ink = img.ink()
    kept = ink[y0:y1, x0:x1].sum() if (y1 > y0 and x1 > x0) else 0.
    if kept < ink.sum():
        util.logwarn("signature {}x{} does not fit the {}x{} canvas: content was clipped".format(
            img.height, img.width, ch, cw))
    return SignatureImage(out, img.polarity)


def invert(img):
    return img.inverted()


def resize(img, size=RESIZED):
    """bilinear resize to (height, width)"""
    im = Image.fromarray(img.pixels).resize((size[1], size[0]), _BILINEAR)
    return SignatureImage(np.array(im), img.polarity)


def center_crop(img, size=CROPPED):
    h, w = size
    if img.height < h or img.width < w:
        raise err.ImageSizeError("at least {}x{}".format(h, w), img.shape)
    top = (img.height - h) // 2
    left = (img.width - w) // 2
    return SignatureImage(img.pixels[top:top + h, left:left + w], img.polarity)


def normalize_signature(img, canvas):
    """the full pipeline, returning an ink-light 150x220 image"""
    img = segment(img)
    img = center_on_canvas(img, canvas)
    img = invert(img)
    img = resize(img, RESIZED)
    return center_crop(img, CROPPED)
