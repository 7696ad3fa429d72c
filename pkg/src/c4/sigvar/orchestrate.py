"""Per-writer parameter optimization, the averaged parameter vector, and
the parameter files."""

import json
import math
import time
import os.path as osp
from collections import OrderedDict as odict
from collections import namedtuple

import numpy as np

from .named_item import NamedItem
from .image import SignatureImage
from .params import Kind, ParameterVector, PASSTHROUGH_DEFAULTS
from . import augment_feature as af
from . import augment_image as ai
from . import features as c4features
from . import preprocess
from . import ingest
from . import metrics
from . import swarm
from . import conf
from . import util
from . import err


SCHEMA = 1

SKIP = 'skip'
ABORT = 'abort'


WriterOptimization = namedtuple('WriterOptimization', ['best', 'fitness', 'trace', 'seed'])


class WriterSet(NamedItem):
    """the genuine samples of one writer: images in image mode, feature
    vectors in feature mode"""

    def __init__(self, writer_id, genuine):
        super().__init__(str(writer_id))
        self.writer_id = str(writer_id)
        self.genuine = genuine

    def __len__(self):
        return len(self.genuine)


def writer_sets(data, kind, ids=None, canvas=None, extractor=None):
    """the genuine samples of the evaluated writers of a dataset. Feature
    mode uses the stored vectors when there are any, and the extracted
    features of the images otherwise."""
    kind = Kind.parse(kind)
    ids = [w.id for w in data.exploitation()] if ids is None else [str(i) for i in ids]
    out = []
    for wid in ids:
        if wid not in data.writers:
            raise err.InvalidArgument("writer", wid, "not in dataset {}".format(data.name))
        refs = data.refs(wid, ingest.GENUINE)
        if kind == Kind.DUPLICATOR:
            if not data.writers[wid].genuine:
                raise err.DataError("image-space optimization needs images: writer {} has none", wid)
            out.append(WriterSet(wid, [data.image(r) for r in refs]))
        elif data.has_vectors:
            out.append(WriterSet(wid, np.array([data.vector(r) for r in refs])))
        else:
            extractor = extractor or c4features.extract
            canvas = canvas or data.canvas
            out.append(WriterSet(wid, np.array([
                extractor(preprocess.normalize_signature(data.image(r), canvas)) for r in refs])))
    return out


# -----------------------------------------------------------------------------
class OptimizationResult:

    def __init__(self, kind, per_writer, average, seed=None, settings=None, fingerprint=None,
                 passthrough=None):
        self.kind = Kind.parse(kind)
        self.per_writer = odict(per_writer)
        self.average = average
        self.seed = seed
        self.settings = odict(settings or {})
        self.fingerprint = fingerprint
        self.passthrough = None if passthrough is None else odict(passthrough)

    @property
    def skipped(self):
        return self.settings.get('skipped', [])


def _fitness(ws, kind, n_per, canvas, extractor, feature_mode, duplicator):
    if kind == Kind.GAUSSIAN:
        def f(pos, rng):
            return af.eval_params_feature(pos, ws.genuine, n_per, rng, feature_mode, ws.writer_id)
        return f
    # the genuine features do not depend on the particle
    extractor = extractor or c4features.extract
    genuine_features = [extractor(preprocess.normalize_signature(g, canvas)) for g in ws.genuine]

    def f(pos, rng):
        return ai.eval_params_image(pos, ws.genuine, n_per, extractor, rng, canvas,
                                    duplicator, genuine_features, ws.writer_id)
    return f


def optimize_writer(ws, kind, n_per=1, iterations=20, swarm_size=swarm.DEFAULT_PARTICLES, seed=0,
                    canvas=None, extractor=None, feature_mode=af.SMOOTH, duplicator=None):
    kind = Kind.parse(kind)
    if len(ws) < 2:
        raise err.InsufficientSamples(ws.writer_id, "genuine samples", 2, len(ws))
    if kind == Kind.DUPLICATOR and canvas is None:
        raise err.InvalidArgument("canvas", canvas, "image-space optimization needs a canvas")
    fitness = _fitness(ws, kind, n_per, canvas, extractor, feature_mode, duplicator)
    best, best_fitness, trace = swarm.optimize(fitness, kind, iterations, swarm_size, seed,
                                               stochastic=True)
    return WriterOptimization(best, best_fitness, trace, seed)


def sigvar_optimize(writers, mode, n_per=1, iterations=20, swarm_size=swarm.DEFAULT_PARTICLES,
                    seed=0, on_error=SKIP, jobs=1, canvas=None, extractor=None,
                    feature_mode=af.SMOOTH, duplicator=None, fingerprint=None):
    """optimize every writer independently, then average the per-writer
    bests. Writers failing their preconditions are skipped with a
    warning, or abort the run with on_error=abort."""
    kind = Kind.parse(mode)
    if on_error not in (SKIP, ABORT):
        raise err.InvalidArgument("on_error", on_error, "use skip|abort")
    writers = list(writers)
    if not writers:
        raise err.InvalidArgument("writer list", "[]", "nothing to optimize")

    def job(ws):
        wseed = util.derive_seed(seed, 'writer', ws.writer_id)
        try:
            return optimize_writer(ws, kind, n_per, iterations, swarm_size, wseed, canvas,
                                   extractor, feature_mode, duplicator)
        except err.DataError as e:
            return e

    util.lognotice("optimizing {} writers: {} particles, {} iterations, kind={}".format(
        len(writers), swarm_size, iterations, kind.value))
    t0 = time.time()
    results = util.parallel_map(job, writers, jobs)
    per_writer = odict()
    skipped = []
    for ws, r in zip(writers, results):
        if isinstance(r, err.Error):
            if on_error == ABORT:
                raise r
            util.logwarn("skipping writer {}: {}".format(ws.writer_id, str(r).replace("ERROR: ", "", 1)))
            skipped.append(ws.writer_id)
            continue
        util.loginfo("writer {}: |silhouette|={:.6f} {}".format(ws.writer_id, r.fitness, r.best))
        per_writer[ws.writer_id] = r
    if not per_writer:
        raise err.DataError("no writer could be optimized ({} skipped)", len(skipped))
    average = ParameterVector.mean(r.best for r in per_writer.values())
    util.logdone("optimized {} writers in {}: average {}".format(
        len(per_writer), util.human_readable_time(time.time() - t0), average))
    settings = odict([
        ('n_per', n_per), ('iterations', iterations), ('particles', swarm_size),
        ('feature_mode', feature_mode), ('skipped', skipped),
    ])
    passthrough = None
    if kind == Kind.DUPLICATOR:
        settings['canvas'] = list(canvas)
        passthrough = duplicator.passthrough if duplicator is not None else PASSTHROUGH_DEFAULTS
    return OptimizationResult(kind, per_writer, average, seed, settings, fingerprint, passthrough)


# -----------------------------------------------------------------------------
def result_as_dict(res):
    d = odict()
    d['schema'] = SCHEMA
    d['kind'] = res.kind.value
    d['average'] = res.average.as_dict()
    if res.passthrough is not None:
        d['passthrough'] = odict(res.passthrough)
    d['seed'] = res.seed
    d['fingerprint'] = res.fingerprint
    d['settings'] = res.settings
    pw = odict()
    for wid, r in res.per_writer.items():
        pw[wid] = odict([
            ('params', r.best.as_dict()),
            ('fitness', r.fitness),
            ('seed', r.seed),
            ('trace', [[t.iteration, t.local_best, t.best] for t in r.trace]),
        ])
    d['per_writer'] = pw
    return d


def save_parameters(path, res):
    with open(path, 'w') as f:
        json.dump(result_as_dict(res), f, indent=1)
        f.write("\n")


def load_parameters(path):
    """an OptimizationResult from a parameter file; files written by hand
    may hold just "kind" and "average" """
    try:
        with open(path, 'r') as f:
            d = json.load(f, object_pairs_hook=odict)
    except FileNotFoundError:
        raise err.ConfigFileNotFound(path)
    except json.JSONDecodeError as e:
        raise err.ParseError(path, "line {}".format(e.lineno), e.msg)
    except (OSError, UnicodeDecodeError) as e:
        raise err.InvalidArgument("parameter file", path, getattr(e, 'strerror', None) or str(e))
    schema = d.get('schema', SCHEMA)
    if not isinstance(schema, int) or schema > SCHEMA:
        raise err.SchemaVersionError(path, schema, SCHEMA)
    if 'average' not in d:
        raise err.ParseError(path, "average", "missing the averaged parameter vector")
    kind = Kind.parse(d['kind']) if 'kind' in d else None
    average = ParameterVector.from_dict(d['average'], kind)
    per_writer = odict()
    for wid, w in d.get('per_writer', {}).items():
        trace = [swarm.TraceEntry(int(t[0]), float(t[1]), float(t[2])) for t in w.get('trace', [])]
        per_writer[wid] = WriterOptimization(ParameterVector.from_dict(w['params'], average.kind),
                                             float(w.get('fitness', math.nan)), trace, w.get('seed'))
    return OptimizationResult(average.kind, per_writer, average, d.get('seed'), d.get('settings'),
                              d.get('fingerprint'), d.get('passthrough'))


def load_vector(path_or_name):
    """the averaged vector of a parameter file, or of a shipped one
    (pi_def, pi_dup, pi_gauss)"""
    path = path_or_name
    if not osp.exists(path) and osp.exists(conf.shipped_params(path_or_name)):
        path = conf.shipped_params(path_or_name)
    return load_parameters(path)


# -----------------------------------------------------------------------------
FeatureValidation = namedtuple('FeatureValidation', ['name', 'writers', 'abs_mean', 'abs_std',
                                                     'cohesion_mean', 'cohesion_std',
                                                     'synthetic_cohesion_mean', 'synthetic_cohesion_std'])


def validate_features(writers, vectors, n_per=1, seed=0, feature_mode=af.SMOOTH, canvas=None,
                      extractor=None, duplicator=None):
    """per named parameter vector: mean and standard deviation over the
    writers of |silhouette| between genuine and synthetic features, and of
    the cohesion of the genuine and of the synthetic clusters. Duplicator
    vectors need writer sets of images; gaussian vectors take either."""
    extractor = extractor or c4features.extract
    has_images = [len(ws) > 0 and isinstance(ws.genuine[0], SignatureImage) for ws in writers]
    genuine_of = [np.array([extractor(preprocess.normalize_signature(g, canvas)) for g in ws.genuine])
                  if imgs else metrics.as_vectors(ws.genuine)
                  for ws, imgs in zip(writers, has_images)]
    out = []
    for name, vector in vectors.items():
        abs_s, coh, syn_coh = [], [], []
        for ws, imgs, genuine in zip(writers, has_images, genuine_of):
            rng = np.random.default_rng(util.derive_seed(seed, 'validate', name, ws.writer_id))
            if vector.kind == Kind.GAUSSIAN:
                synth = af.synthesize_cluster(genuine, vector, n_per, rng, feature_mode)
            elif not imgs:
                raise err.DataError("{}: duplicator vectors need images, writer {} has vectors",
                                    name, ws.writer_id)
            else:
                cfg = ai.DuplicatorConfig(vector) if duplicator is None else duplicator.with_variability(vector)
                synth = np.array([extractor(preprocess.normalize_signature(d, canvas))
                                  for g in ws.genuine for d in ai.duplicate(g, cfg, n_per, rng)])
            clusters = [metrics.Cluster(genuine, 'genuine'), metrics.Cluster(synth, 'synthetic')]
            abs_s.append(metrics.abs_silhouette(clusters))
            coh.append(metrics.cohesion(clusters[0]))
            syn_coh.append(metrics.cohesion(clusters[1]))
        out.append(FeatureValidation(name, len(abs_s), float(np.mean(abs_s)), float(np.std(abs_s)),
                                     float(np.mean(coh)), float(np.std(coh)),
                                     float(np.mean(syn_coh)), float(np.std(syn_coh))))
        util.loginfo("{}: |silhouette| {:.4f} +- {:.4f}, cohesion {:.4f} +- {:.4f}".format(
            name, out[-1].abs_mean, out[-1].abs_std, out[-1].cohesion_mean, out[-1].cohesion_std))
    return out


SweepRow = namedtuple('SweepRow', ['writer', 'sigma', 'abs_silhouette'])


def sweep_sigma(writers, sigmas, n_per=1, seed=0, feature_mode=af.SMOOTH):
    """|silhouette| of each writer's genuine vectors against vectors
    filtered at exactly sigma (sigma_min = sigma_max = sigma). Values of
    sigma outside the search box are accepted."""
    rows = []
    for ws in writers:
        genuine = metrics.as_vectors(ws.genuine)
        if len(genuine) < 2:
            raise err.InsufficientSamples(ws.writer_id, "genuine vectors", 2, len(genuine))
        for sigma in sigmas:
            rng = np.random.default_rng(util.derive_seed(seed, 'sweep', ws.writer_id, repr(float(sigma))))
            params = ParameterVector(Kind.GAUSSIAN, (sigma, sigma))
            value = af.eval_params_feature(params, genuine, n_per, rng, feature_mode, ws.writer_id)
            rows.append(SweepRow(ws.writer_id, float(sigma), value))
    return rows
