import enum

import numpy as np
from PIL import Image, UnidentifiedImageError

from . import err


class Polarity(enum.Enum):
    INK_DARK = 'ink-dark-on-light'
    INK_LIGHT = 'ink-light-on-dark'

    @property
    def background(self):
        return 255 if self == Polarity.INK_DARK else 0

    def flipped(self):
        return Polarity.INK_LIGHT if self == Polarity.INK_DARK else Polarity.INK_DARK


class SignatureImage:
    """an 8-bit grayscale raster, row-major, with its ink polarity.
    Scanned signatures are ink-dark; normalized ones are ink-light."""

    def __init__(self, pixels, polarity=Polarity.INK_DARK):
        pixels = np.asarray(pixels)
        if pixels.ndim != 2:
            raise err.ImageSizeError("a 2-d raster", pixels.shape)
        if pixels.dtype != np.uint8:
            pixels = np.clip(np.rint(pixels), 0, 255).astype(np.uint8)
        self.pixels = pixels
        self.polarity = polarity

    @property
    def height(self):
        return self.pixels.shape[0]

    @property
    def width(self):
        return self.pixels.shape[1]

    @property
    def shape(self):
        return self.pixels.shape

    @property
    def background(self):
        return self.polarity.background

    def ink(self):
        """ink strength of every pixel, 0 for background, as float64"""
        p = self.pixels.astype(np.float64)
        return 255. - p if self.polarity == Polarity.INK_DARK else p

    def inverted(self):
        return SignatureImage(255 - self.pixels, self.polarity.flipped())

    def is_blank(self):
        return bool(np.all(self.pixels == self.background))

    def __eq__(self, other):
        return (isinstance(other, SignatureImage) and self.polarity == other.polarity
                and self.pixels.shape == other.pixels.shape
                and bool(np.array_equal(self.pixels, other.pixels)))

    def __repr__(self):
        return "SignatureImage({}x{}, {})".format(self.height, self.width, self.polarity.value)

    # -------------------------------------------------------------------------
    @staticmethod
    def load(path, polarity=Polarity.INK_DARK):
        try:
            with Image.open(path) as im:
                return SignatureImage(np.array(im.convert('L')), polarity)
        except FileNotFoundError:
            raise err.UnreadableFile(path, "file not found")
        except UnidentifiedImageError:
            raise err.UnreadableFile(path, "not a recognized image format")
        except OSError as e:
            raise err.UnreadableFile(path, e.strerror or str(e).splitlines()[0])
        except (SyntaxError, ValueError) as e:
            raise err.UnreadableFile(path, "broken image: {}".format(e))

    def save(self, path):
        Image.fromarray(self.pixels).save(path, format='PNG')
