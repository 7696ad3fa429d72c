"""Equal error rates and the evaluation protocol: repeated random
selections of training and test samples, one classifier per writer and
per augmentation amount d, and the EER over the pooled test scores."""

import os
import io
import csv
import json
import math
import time
from collections import OrderedDict as odict
from collections import namedtuple

import numpy as np
import matplotlib
from matplotlib.figure import Figure

from .params import Kind
from . import augment_feature as af
from . import augment_image as ai
from . import features as c4features
from . import preprocess
from . import ingest
from . import verify
from . import util
from . import err


GLOBAL = 'global'
WRITER = 'writer'
THRESHOLDS = (GLOBAL, WRITER)

EerPoint = namedtuple('EerPoint', ['eer', 'far', 'frr', 'threshold'])


def _scores(s, what):
    s = np.sort(np.asarray(s, dtype=np.float64).ravel())
    if s.size == 0:
        raise err.InvalidArgument("{} scores".format(what), "[]", "need at least one")
    if not np.all(np.isfinite(s)):
        raise err.NumericalError("non-finite {} score", what)
    return s


def candidate_thresholds(genuine, forgery):
    """every distinct score, the midpoints between neighbours, and one
    threshold beyond each end"""
    u = np.unique(np.concatenate([genuine, forgery]))
    mids = (u[:-1] + u[1:]) / 2.
    return np.unique(np.concatenate([[u[0] - 1.], u, mids, [u[-1] + 1.]]))


def error_rates(genuine, forgery, thresholds):
    """(far, frr) at each threshold: a sample is accepted above the
    threshold and rejected below it; a tie counts half"""
    g = np.sort(genuine)
    f = np.sort(forgery)
    t = np.asarray(thresholds, dtype=np.float64)
    g_lo = np.searchsorted(g, t, 'left')
    g_hi = np.searchsorted(g, t, 'right')
    f_lo = np.searchsorted(f, t, 'left')
    f_hi = np.searchsorted(f, t, 'right')
    frr = (2. * g_lo + (g_hi - g_lo)) / (2. * len(g))
    far = (2. * (len(f) - f_hi) + (f_hi - f_lo)) / (2. * len(f))
    return far, frr


def eer_point(genuine, forgery):
    """the threshold where FAR and FRR are closest (the lowest such one
    on ties) and the EER there, (FAR + FRR) / 2"""
    g = _scores(genuine, "genuine")
    f = _scores(forgery, "forgery")
    t = candidate_thresholds(g, f)
    far, frr = error_rates(g, f, t)
    k = int(np.argmin(np.abs(far - frr)))
    return EerPoint(float((far[k] + frr[k]) / 2.), float(far[k]), float(frr[k]), float(t[k]))


def compute_eer(genuine, forgery):
    return eer_point(genuine, forgery).eer


def writer_eer(per_writer):
    """the mean over writers of each writer's own EER. per_writer is a
    sequence of (genuine scores, forgery scores)."""
    pts = [eer_point(g, f) for g, f in per_writer]
    if not pts:
        raise err.InvalidArgument("writer scores", "[]", "need at least one writer")
    return EerPoint(float(np.mean([p.eer for p in pts])), float(np.mean([p.far for p in pts])),
                    float(np.mean([p.frr for p in pts])), math.nan)


# -----------------------------------------------------------------------------
class ProtocolConfig:

    def __init__(self, r_values=(1,), d_values=(0,), reps=10, seed=0, split=None, params=None,
                 duplicator=None, feature_mode=af.SMOOTH, augment_negatives=True, gamma=None,
                 tol=verify.DEFAULT_TOL, max_iter=verify.DEFAULT_MAX_ITER,
                 cache_mb=verify.DEFAULT_CACHE_MB, threshold=GLOBAL, jobs=1, canvas=None,
                 extractor=None):
        self.r_values = [int(r) for r in r_values]
        self.d_values = [int(d) for d in d_values]
        if not self.r_values or min(self.r_values) < 1:
            raise err.InvalidArgument("r values", r_values, "need positive integers")
        if not self.d_values or min(self.d_values) < 0:
            raise err.InvalidArgument("d values", d_values, "need non-negative integers")
        if reps < 1:
            raise err.InvalidArgument("repetitions", reps, "need at least 1")
        if threshold not in THRESHOLDS:
            raise err.InvalidArgument("threshold mode", threshold, "use global|writer")
        if gamma is not None and not gamma > 0:
            raise err.InvalidArgument("gamma", gamma, "must be positive")
        self.reps = int(reps)
        self.seed = seed
        self.split = ingest.SplitConfig() if split is None else split
        self.params = params
        self.duplicator = duplicator
        self.feature_mode = feature_mode
        self.augment_negatives = augment_negatives
        self.gamma = gamma
        self.tol = tol
        self.max_iter = max_iter
        self.cache_mb = cache_mb
        self.threshold = threshold
        self.jobs = jobs
        self.canvas = canvas
        self.extractor = extractor or c4features.extract

    @property
    def max_d(self):
        return max(self.d_values) if self.params is not None else 0

    def settings(self):
        return odict([
            ('r', self.r_values), ('d', self.d_values), ('reps', self.reps),
            ('split', self.split.as_dict()), ('augment_negatives', self.augment_negatives),
            ('gamma', self.gamma), ('threshold', self.threshold),
        ])


EerRow = namedtuple('EerRow', ['rep', 'r', 'd', 'eer', 'far', 'frr', 'seed'])
DetailRow = namedtuple('DetailRow', ['rep', 'r', 'd', 'eer_global', 'eer_writer', 'eer_skilled',
                                     'eer_random', 'writers', 'positives', 'negatives', 'gamma'])

WriterJob = namedtuple('WriterJob', ['writer', 'positives', 'positives_synth', 'negatives',
                                     'negatives_synth', 'test_genuine', 'test_skilled',
                                     'test_random', 'd_values', 'gamma', 'tol', 'max_iter',
                                     'cache_mb'])

WriterScores = namedtuple('WriterScores', ['genuine', 'skilled', 'random', 'positives', 'negatives'])


class EerReport:

    def __init__(self, dataset, seed, rows, details, settings=None):
        self.dataset = dataset
        self.seed = seed
        self.rows = list(rows)
        self.details = list(details)
        self.settings = odict(settings or {})

    def summary(self):
        """per (r, d): mean and population standard deviation of the EER
        over the repetitions"""
        groups = odict()
        for row in self.rows:
            groups.setdefault((row.r, row.d), []).append(row)
        out = []
        for (r, d), rows in groups.items():
            eers = np.array([x.eer for x in rows])
            out.append(odict([
                ('r', r), ('d', d), ('reps', len(rows)),
                ('eer_mean', float(eers.mean())), ('eer_std', float(eers.std())),
                ('far_mean', float(np.mean([x.far for x in rows]))),
                ('frr_mean', float(np.mean([x.frr for x in rows]))),
            ]))
        return out


# -----------------------------------------------------------------------------
class _Features:
    """feature vectors of the real samples, and of their synthetic
    counterparts. Real samples come from the feature store whenever the
    dataset has one, image-space augmentation included; only the
    synthetic images go through the extractor, which must then produce
    vectors of the stored dimension."""

    def __init__(self, data, cfg):
        self.data = data
        self.cfg = cfg
        self.canvas = cfg.canvas or data.canvas
        params = cfg.params
        self.image_space = params is not None and params.kind == Kind.DUPLICATOR and cfg.max_d > 0
        if self.image_space and not data.has_images:
            raise err.DataError("image-space augmentation needs images: dataset {} has none", data.name)
        self.use_vectors = data.has_vectors
        self.real = {}

    def _extract(self, img):
        return self.cfg.extractor(preprocess.normalize_signature(img, self.canvas))

    def load(self, refs):
        todo = [r for r in dict.fromkeys(refs) if r not in self.real]
        if not todo:
            return
        if self.use_vectors:
            for r in todo:
                self.real[r] = np.asarray(self.data.vector(r), dtype=np.float64)
            return
        data, extract = self.data, self._extract
        vals = util.parallel_map(lambda r: extract(data.image(r)), todo, self.cfg.jobs)
        self.real.update(zip(todo, vals))

    def synthetic(self, refs, seeds):
        """max_d synthetic vectors per ref, one generator per ref"""
        cfg = self.cfg
        n = cfg.max_d
        params = cfg.params
        if params.kind == Kind.GAUSSIAN:
            real = self.real
            return [af.perturb_features(real[r], params, n, np.random.default_rng(s), cfg.feature_mode)
                    for r, s in zip(refs, seeds)]
        dup = ai.DuplicatorConfig(params) if cfg.duplicator is None else cfg.duplicator.with_variability(params)
        data, extract = self.data, self._extract

        def job(rs):
            r, s = rs
            imgs = ai.duplicate(data.image(r), dup, n, np.random.default_rng(s))
            return np.array([extract(d) for d in imgs])
        out = util.parallel_map(job, list(zip(refs, seeds)), cfg.jobs)
        if self.use_vectors and out:
            dim = len(self.data.vector(refs[0]))
            for s in out:
                if s.shape[1] != dim:
                    raise err.DimensionMismatch(dim, s.shape[1])
        return out


def _stack(vs, dim):
    return np.array(vs) if len(vs) else np.empty((0, dim))


def _with_synthetic(real, synth, d):
    if d == 0 or synth is None:
        return real
    return np.concatenate([real] + [s[:d] for s in synth])


def _score_writer(job):
    out = []
    for d in job.d_values:
        pos = _with_synthetic(job.positives, job.positives_synth, d)
        neg = _with_synthetic(job.negatives, job.negatives_synth, d)
        c = verify.train_wd_classifier(verify.TrainingSet(pos, neg), job.gamma, job.tol,
                                       job.max_iter, job.cache_mb, name=job.writer)

        def scores(v):
            return c.scores(v) if len(v) else np.empty(0)
        out.append(WriterScores(scores(job.test_genuine), scores(job.test_skilled),
                                scores(job.test_random), len(pos), len(neg)))
    return out


def _rep_rows(rep, r, seed, d_values, writers, scores, threshold, gamma):
    rows, details = [], []
    for k, d in enumerate(d_values):
        per_writer = [s[k] for s in scores]
        gen = np.concatenate([s.genuine for s in per_writer])
        skl = np.concatenate([s.skilled for s in per_writer])
        rnd = np.concatenate([s.random for s in per_writer])
        forg = np.concatenate([skl, rnd])
        glob = eer_point(gen, forg)
        wr = writer_eer([(s.genuine, np.concatenate([s.skilled, s.random])) for s in per_writer])
        head = glob if threshold == GLOBAL else wr
        rows.append(EerRow(rep, r, d, head.eer, head.far, head.frr, seed))
        details.append(DetailRow(rep, r, d, glob.eer, wr.eer,
                                 compute_eer(gen, skl) if len(skl) else math.nan,
                                 compute_eer(gen, rnd) if len(rnd) else math.nan,
                                 len(writers), per_writer[0].positives, per_writer[0].negatives, gamma))
    return rows, details


def run_protocol(cfg, data, seed=None):
    """the full protocol over cfg.reps repetitions, every r and every d.
    Synthetic samples are drawn once per repetition and sample for the
    largest d; smaller d use a prefix of them, so d=0 trains on exactly
    the real samples."""
    seed = cfg.seed if seed is None else seed
    feats = _Features(data, cfg)
    rows, details = [], []
    t0 = time.time()
    for rep in range(cfg.reps):
        for r in cfg.r_values:
            split_seed = util.derive_seed(seed, 'split', rep, r)
            sp = ingest.split(data, r, np.random.default_rng(split_seed), cfg.split)
            if not sp:
                raise err.DataError("dataset {} has no writers to evaluate", data.name)
            refs = [ref for ws in sp.values() for ref in (ws.train_genuine + ws.train_random + ws.test_genuine
                                                          + ws.test_skilled + ws.test_random)]
            feats.load(refs)
            real = feats.real
            dim = len(real[refs[0]])
            train_refs = list(dict.fromkeys(ref for ws in sp.values() for ref in ws.train_genuine + ws.train_random))
            gamma = cfg.gamma
            if gamma is None:
                gamma = verify.default_gamma(np.array([real[ref] for ref in train_refs]))
            synth = {}
            if cfg.max_d > 0:
                positives = {ref for ws in sp.values() for ref in ws.train_genuine}
                want = [ref for ref in train_refs if cfg.augment_negatives or ref in positives]
                seeds = [util.derive_seed(seed, 'synth', rep, r, ref.key) for ref in want]
                synth = dict(zip(want, feats.synthetic(want, seeds)))
            jobs = []
            for ws in sp.values():
                neg_synth = [synth[ref] for ref in ws.train_random] if cfg.max_d > 0 and cfg.augment_negatives else None
                jobs.append(WriterJob(
                    ws.writer,
                    _stack([real[ref] for ref in ws.train_genuine], dim),
                    [synth[ref] for ref in ws.train_genuine] if cfg.max_d > 0 else None,
                    _stack([real[ref] for ref in ws.train_random], dim),
                    neg_synth,
                    _stack([real[ref] for ref in ws.test_genuine], dim),
                    _stack([real[ref] for ref in ws.test_skilled], dim),
                    _stack([real[ref] for ref in ws.test_random], dim),
                    cfg.d_values, gamma, cfg.tol, cfg.max_iter, cfg.cache_mb))
            scores = util.parallel_map(_score_writer, jobs, cfg.jobs)
            rr, dd = _rep_rows(rep, r, split_seed, cfg.d_values, sp, scores, cfg.threshold, gamma)
            rows += rr
            details += dd
            util.loginfo("rep {} r={}: ".format(rep, r) +
                         " ".join("d={}:{:.4f}".format(x.d, x.eer) for x in rr))
    util.logdone("evaluated {} repetitions in {}".format(cfg.reps, util.human_readable_time(time.time() - t0)))
    return EerReport(data.name, seed, rows, details, cfg.settings())


def select_gamma(candidates, data, cfg, seed=None):
    """the candidate gamma with the lowest EER on one validation split,
    without augmentation. Ties go to the first candidate."""
    seed = cfg.seed if seed is None else seed
    best = None
    for g in candidates:
        vcfg = ProtocolConfig(cfg.r_values[-1:], (0,), 1, util.derive_seed(seed, 'gamma'), cfg.split,
                              None, None, cfg.feature_mode, cfg.augment_negatives, g, cfg.tol,
                              cfg.max_iter, cfg.cache_mb, cfg.threshold, cfg.jobs, cfg.canvas, cfg.extractor)
        e = run_protocol(vcfg, data).rows[0].eer
        util.loginfo("gamma={:.6g}: validation EER {:.4f}".format(g, e))
        if best is None or e < best[1]:
            best = (g, e)
    return best[0]


# -----------------------------------------------------------------------------
def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _csv_text(header, rows):
    f = io.StringIO()
    w = csv.writer(f, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return f.getvalue()


def _json_safe(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None
    if isinstance(v, dict):
        return odict((k, _json_safe(x)) for k, x in v.items())
    if isinstance(v, (list, tuple)):
        return [_json_safe(x) for x in v]
    return v


def eer_csv(report):
    return _csv_text(EerRow._fields, report.rows)


def detail_csv(report):
    return _csv_text(DetailRow._fields, report.details)


def summary_csv(report):
    s = report.summary()
    return _csv_text(list(s[0].keys()) if s else [], [list(x.values()) for x in s])


def summary_dict(report):
    return _json_safe(odict([
        ('dataset', report.dataset),
        ('seed', report.seed),
        ('settings', report.settings),
        ('summary', report.summary()),
    ]))


def write_chart(report, path):
    """EER against d, one line per r, with the summary table embedded in
    the svg metadata"""
    summary = report.summary()
    fig = Figure(figsize=(6, 4))
    ax = fig.add_subplot(1, 1, 1)
    for r in sorted({s['r'] for s in summary}):
        pts = [s for s in summary if s['r'] == r]
        ax.errorbar([s['d'] for s in pts], [100. * s['eer_mean'] for s in pts],
                    yerr=[100. * s['eer_std'] for s in pts], marker='o', capsize=3, label="r={}".format(r))
    ax.set_xlabel("synthetic samples per real sample (d)")
    ax.set_ylabel("EER (%)")
    ax.set_title(report.dataset)
    ax.grid(True, alpha=0.3)
    ax.legend()
    with matplotlib.rc_context({'svg.hashsalt': 'sigvar', 'svg.fonttype': 'none'}):
        fig.savefig(path, format='svg', metadata={'Date': None, 'Description': summary_csv(report)})


def write_report(report, outdir, chart=True):
    """eer.csv, eer_detail.csv, summary.json and eer_vs_d.svg. The files
    depend only on the report, so equal runs write equal bytes."""
    os.makedirs(outdir, exist_ok=True)
    paths = odict()
    paths['eer'] = os.path.join(outdir, 'eer.csv')
    paths['detail'] = os.path.join(outdir, 'eer_detail.csv')
    paths['summary'] = os.path.join(outdir, 'summary.json')
    with open(paths['eer'], 'w') as f:
        f.write(eer_csv(report))
    with open(paths['detail'], 'w') as f:
        f.write(detail_csv(report))
    with open(paths['summary'], 'w') as f:
        json.dump(summary_dict(report), f, indent=1)
        f.write("\n")
    if chart:
        paths['chart'] = os.path.join(outdir, 'eer_vs_d.svg')
        write_chart(report, paths['chart'])
    for p in paths.values():
        util.logdbg("wrote {}".format(p))
    return paths
