"""Generated datasets for demos and tests: writers of stroke-drawn
signature images, or writers of feature vectors."""

import os
import os.path as osp
from collections import OrderedDict as odict

import numpy as np
from PIL import Image, ImageDraw

from .params import Kind, ParameterVector
from .image import Polarity, SignatureImage
from . import augment_image as ai
from . import features as c4features
from . import ingest
from . import util
from . import err


SIZE = (160, 240)
CANVAS = (180, 260)


def writer_template(rng, size=SIZE, strokes=3, points=7):
    """a few smooth polylines in image coordinates, kept inside a margin"""
    h, w = size
    out = []
    x0 = 0.15 * w
    for s in range(strokes):
        xs = x0 + np.cumsum(rng.uniform(0.02, 0.06, points) * w)
        ys = 0.5 * h + np.cumsum(rng.normal(0., 0.12, points) * h)
        xs = np.clip(xs, 0.08 * w, 0.92 * w)
        ys = np.clip(ys, 0.15 * h, 0.85 * h)
        out.append(np.stack([xs, ys], axis=1))
        x0 = min(xs[-1] + 0.02 * w, 0.7 * w)
    return out


def render(strokes, size=SIZE, width=3):
    h, w = size
    im = Image.new('L', (w, h), 255)
    d = ImageDraw.Draw(im)
    for s in strokes:
        d.line([tuple(p) for p in s], fill=0, width=width, joint='curve')
    return SignatureImage(np.asarray(im), Polarity.INK_DARK)


def sample(template, rng, jitter, size=SIZE, width=3, slant=0.):
    h, w = size
    scale = rng.uniform(0.95, 1.05)
    shift = rng.normal(0., 2., 2)
    center = np.array([w / 2., h / 2.])
    out = []
    for s in template:
        p = (s - center) * scale + center + shift + rng.normal(0., jitter, s.shape)
        p[:, 0] += slant * (center[1] - p[:, 1])
        out.append(p)
    return render(out, size, width)


def writer_variability(rng):
    a = rng.uniform(30., 60.)
    p = rng.uniform(0.5, 1.)
    return ParameterVector(Kind.DUPLICATOR, (a, a + 20., p, min(1., p + 0.3), 0., 1.))


def make_writer(rng, genuine=8, skilled=4, size=SIZE):
    """(genuine images, skilled forgery images) of one writer. Genuine
    samples vary by jitter and a sinusoidal deformation of the writer's
    own strength; forgeries trace the same template with heavier jitter,
    a thinner pen and a slant."""
    template = writer_template(rng, size)
    variability = writer_variability(rng)
    gen = [ai.sinusoidal_deform(sample(template, rng, 1.5, size), variability, rng) for _ in range(genuine)]
    skl = [sample(template, rng, 4., size, width=2, slant=rng.uniform(-0.15, 0.15)) for _ in range(skilled)]
    return gen, skl


def make_dataset(outdir, writers=20, genuine=8, skilled=4, seed=0, size=SIZE, canvas=CANVAS,
                 development=0, name='synthetic'):
    """write <outdir>/<writer>/{genuine,skilled}/*.png and
    <outdir>/manifest.json; the last `development` writers only serve as
    random forgeries. Returns the manifest path."""
    if writers < 2:
        raise err.InvalidArgument("writer count", writers, "need at least 2")
    if genuine < 2:
        raise err.InvalidArgument("genuine count", genuine, "need at least 2")
    if size[0] > canvas[0] or size[1] > canvas[1]:
        raise err.InvalidArgument("image size", size, "must fit the canvas {}".format(canvas))
    ids = ["{:03d}".format(i + 1) for i in range(writers)]
    for wid in ids:
        rng = np.random.default_rng(util.derive_seed(seed, 'synthetic', wid))
        gen, skl = make_writer(rng, genuine, skilled, size)
        for kind, imgs, tag in ((ingest.GENUINE, gen, 'g'), (ingest.SKILLED, skl, 's')):
            d = osp.join(outdir, wid, kind)
            os.makedirs(d, exist_ok=True)
            for k, img in enumerate(imgs):
                img.save(osp.join(d, "{}_{}{:02d}.png".format(wid, tag, k)))
    m = ingest.generate_manifest(outdir, name, 'synthetic', canvas,
                                 {ingest.GENUINE: genuine, ingest.SKILLED: skilled},
                                 development=ids[len(ids) - development:] if development else ())
    path = osp.join(outdir, 'manifest.json')
    ingest.write_manifest(m, path)
    util.logdone("wrote {} writers to {}".format(writers, outdir))
    return path


# -----------------------------------------------------------------------------
def make_feature_writers(writers=5, genuine=10, skilled=0, dim=32, seed=0):
    """writer -> {genuine, skilled} arrays. Each writer is an anisotropic
    gaussian cluster: center N(0, 1), per-dimension spread U(0.05, 0.3).
    Skilled forgeries sit around a shifted center."""
    out = odict()
    for i in range(writers):
        wid = str(i + 1)
        rng = np.random.default_rng(util.derive_seed(seed, 'features', wid))
        center = rng.normal(0., 1., dim)
        spread = rng.uniform(0.05, 0.3, dim)
        gen = center + spread * rng.standard_normal((genuine, dim))
        forged = center + rng.normal(0., 0.5, dim)
        skl = forged + spread * rng.standard_normal((skilled, dim))
        out[wid] = {ingest.GENUINE: gen, ingest.SKILLED: skl}
    return out


def make_feature_dataset(outdir, writers=5, genuine=10, skilled=0, dim=32, seed=0, binary=False,
                         name='synthetic-features'):
    """a feature store plus a manifest pointing at it. Returns the
    manifest path."""
    os.makedirs(outdir, exist_ok=True)
    vectors = make_feature_writers(writers, genuine, skilled, dim, seed)
    records = []
    for wid, kinds in vectors.items():
        records += list(c4features.records_of({wid: kinds[ingest.GENUINE]}, c4features.GENUINE))
        records += list(c4features.records_of({wid: kinds[ingest.SKILLED]}, c4features.SKILLED))
    store = 'features.bin' if binary else 'features.txt'
    c4features.write_store(osp.join(outdir, store), records, binary)
    m = odict([
        ('name', name), ('dataset', 'synthetic'), ('canvas', list(CANVAS)),
        ('declared', {ingest.GENUINE: genuine, ingest.SKILLED: skilled}),
        ('features', store),
        ('writers', [odict([('id', wid), ('role', ingest.EXPLOITATION)]) for wid in vectors]),
    ])
    path = osp.join(outdir, 'manifest.json')
    ingest.write_manifest(m, path)
    return path
