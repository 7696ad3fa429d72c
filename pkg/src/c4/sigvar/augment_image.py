"""Image-space duplication: a sinusoidal deformation of the writing
surface driven by the six variability parameters, and an adapter to an
external duplicator executable."""

import os
import glob
import shlex
import tempfile
from collections import OrderedDict as odict

import numpy as np
from scipy.ndimage import map_coordinates

from .params import Kind, ParameterVector, PASSTHROUGH_DEFAULTS, DEFAULT_VARIABILITY
from .image import SignatureImage
from . import preprocess
from . import metrics
from . import util
from . import err


MIN_PERIOD = 0.05


class DuplicatorConfig:
    """the variability vector plus the parameters only an external
    duplicator honors"""

    def __init__(self, variability=None, passthrough=None, executable=None,
                 min_period=MIN_PERIOD):
        if variability is None:
            variability = ParameterVector(Kind.DUPLICATOR, DEFAULT_VARIABILITY)
        elif not isinstance(variability, ParameterVector):
            variability = ParameterVector(Kind.DUPLICATOR, variability)
        if variability.kind != Kind.DUPLICATOR:
            raise err.InvalidParameterVector(variability.kind.value, variability.values,
                                             "expected a duplicator parameter vector")
        self.variability = variability
        self.passthrough = odict(PASSTHROUGH_DEFAULTS)
        for k, v in (passthrough or {}).items():
            if k not in PASSTHROUGH_DEFAULTS:
                raise err.InvalidArgument("duplicator parameter", k)
            self.passthrough[k] = float(v)
        self.executable = executable or None
        self.min_period = min_period

    def with_variability(self, variability):
        return DuplicatorConfig(variability, self.passthrough, self.executable, self.min_period)

    def params_text(self):
        """flat key=value list of every duplicator parameter"""
        items = list(self.variability.as_dict().items()) + list(self.passthrough.items())
        return "".join("{}={!r}\n".format(k, v) for k, v in items)


# -----------------------------------------------------------------------------
def displacement_field(shape, amplitude, period, phase_x, phase_y):
    """(dy, dx) displacement of every pixel of a (height, width) image.
    The magnitude goes with 1/amplitude; period is a fraction of the
    image extent, the phases fractions of a full turn."""
    h, w = shape
    yy, xx = np.mgrid[0:h, 0:w].astype(np.float64)
    dx = (w / amplitude) * np.sin(2. * np.pi * yy / (period * h) + 2. * np.pi * phase_x)
    dy = (h / amplitude) * np.sin(2. * np.pi * xx / (period * w) + 2. * np.pi * phase_y)
    return dy, dx


def draw_deformation(variability, rng, min_period=MIN_PERIOD):
    amin, amax, pmin, pmax, smin, smax = variability.values
    amplitude = rng.uniform(amin, amax)
    period = max(rng.uniform(pmin, pmax), min_period)
    phase_x = rng.uniform(smin, smax)
    phase_y = rng.uniform(smin, smax)
    return amplitude, period, phase_x, phase_y


def warp(img, dy, dx):
    """resample img at (y + dy, x + dx), bilinear, background outside"""
    h, w = img.shape
    yy, xx = np.mgrid[0:h, 0:w].astype(np.float64)
    out = map_coordinates(img.pixels.astype(np.float64), [yy + dy, xx + dx],
                          order=1, mode='constant', cval=float(img.background))
    return SignatureImage(np.clip(np.rint(out), 0, 255).astype(np.uint8), img.polarity)


def sinusoidal_deform(img, variability, rng, min_period=MIN_PERIOD):
    if img.height * img.width == 0:
        raise err.ImageSizeError("a non-empty image", img.shape)
    if not isinstance(variability, ParameterVector):
        variability = ParameterVector(Kind.DUPLICATOR, variability)
    if variability.kind != Kind.DUPLICATOR:
        raise err.InvalidParameterVector(variability.kind.value, variability.values,
                                         "expected a duplicator parameter vector")
    dy, dx = displacement_field(img.shape, *draw_deformation(variability, rng, min_period))
    return warp(img, dy, dx)


# -----------------------------------------------------------------------------
class ExternalDuplicator:
    """runs `<exe> --params <file> --input <png> --output-dir <dir>
    --count N --seed S` and reads back the N pngs written to dir"""

    def __init__(self, executable):
        self.cmd = shlex.split(executable) if isinstance(executable, str) else list(executable)

    def run(self, img, config, n, seed):
        with tempfile.TemporaryDirectory(prefix='sigvar.') as tmp:
            params = os.path.join(tmp, 'params.txt')
            with open(params, 'w') as f:
                f.write(config.params_text())
            inp = os.path.join(tmp, 'input.png')
            img.save(inp)
            outdir = os.path.join(tmp, 'out')
            os.makedirs(outdir)
            cmd = self.cmd + ['--params', params, '--input', inp, '--output-dir', outdir,
                              '--count', str(n), '--seed', str(seed)]
            try:
                sp = util.runcmd(cmd)
            except OSError as e:
                raise err.AdapterFailed(shlex.join(cmd), "-", str(e))
            if sp.returncode != 0:
                raise err.AdapterFailed(shlex.join(cmd), sp.returncode, sp.stderr or sp.stdout or "")
            files = sorted(glob.glob(os.path.join(outdir, '*.png')))
            if len(files) != n:
                raise err.AdapterFailed(shlex.join(cmd), 0,
                                        "expected {} images, found {}".format(n, len(files)))
            return [SignatureImage.load(fn, img.polarity) for fn in files]


def duplicate(img, config, n, rng):
    """n independent duplicates of img"""
    if n < 1:
        raise err.InvalidArgument("duplicate count", n, "need at least 1")
    if config.executable:
        seed = int(rng.integers(0, 2**32))
        return ExternalDuplicator(config.executable).run(img, config, n, seed)
    return [sinusoidal_deform(img, config.variability, rng, config.min_period) for _ in range(n)]


def eval_params_image(variability, genuine_images, n_per, extractor, rng, canvas,
                      config=None, genuine_features=None, writer=None):
    """|silhouette| between the features of the genuine images and of
    their duplicates, all normalized on canvas"""
    if len(genuine_images) < 2:
        raise err.InsufficientSamples(writer if writer is not None else "?",
                                      "genuine images", 2, len(genuine_images))
    config = DuplicatorConfig(variability) if config is None else config.with_variability(variability)

    def features_of(img):
        return extractor(preprocess.normalize_signature(img, canvas))

    if genuine_features is None:
        genuine_features = [features_of(g) for g in genuine_images]
    synthetic = [features_of(d) for g in genuine_images for d in duplicate(g, config, n_per, rng)]
    return metrics.abs_silhouette([metrics.Cluster(genuine_features, 'genuine'),
                                   metrics.Cluster(synthetic, 'duplicates')])
