"""One sigvar invocation: the merged configuration, the seed and jobs in
effect, and the provenance record written next to the outputs."""

import os
import os.path as osp
import csv
import json
import glob
import platform
from collections import OrderedDict as odict
from importlib import metadata

import numpy as np

from .params import Kind
from .image import SignatureImage
from . import augment_feature as af
from . import augment_image as ai
from . import features as c4features
from . import orchestrate
from . import evaluate
from . import synthetic
from . import ingest
from . import conf
from . import util
from . import err
from . import __version__
from .util import logdbg as dbg


RUN_SCHEMA = 1
SEED_ENV = 'SIGVAR_SEED'

# the packages whose versions go into the provenance record
_VERSIONED = ('numpy', 'scipy', 'Pillow', 'matplotlib', 'ruamel.yaml', 'dill')


def resolve_seed(seed):
    env = os.environ.get(SEED_ENV)
    if env is not None and env.strip():
        try:
            return int(env)
        except ValueError:
            raise err.InvalidArgument(SEED_ENV, env, "must be an integer")
    return 0 if seed is None else int(seed)


def versions():
    v = odict([('sigvar', __version__), ('python', platform.python_version())])
    for pkg in _VERSIONED:
        try:
            v[pkg] = metadata.version(pkg)
        except metadata.PackageNotFoundError:
            v[pkg] = None
    return v


def _plain_args(kwargs):
    return odict((k, v) for k, v in sorted(kwargs.items())
                 if k != 'func' and isinstance(v, (str, int, float, bool, list, type(None))))


# -----------------------------------------------------------------------------
class Session:

    def __init__(self, **kwargs):
        self.kwargs = kwargs
        self.command = kwargs.get('command')
        util._quiet_mode = bool(kwargs.get('quiet'))
        self.configs = conf.Configs.default(kwargs.get('config') or [],
                                            not kwargs.get('no_default_config'))
        self.seed = resolve_seed(kwargs.get('seed'))
        jobs = kwargs.get('jobs')
        self.jobs = util.cpu_count() if jobs is None else int(jobs)
        dbg("command:", self.command)
        dbg("seed:", self.seed, "jobs:", self.jobs)
        dbg("config fingerprint:", self.configs.fingerprint())

    def cfg(self, name, default=None):
        return self.configs.get_val(name, default)

    # -------------------------------------------------------------------------
    def load_dataset(self, path=None, check_files=True):
        path = path or self.kwargs.get('manifest')
        if not path:
            raise err.InvalidArgument("manifest", path, "give one with --manifest")
        canvases = {k: v.get('canvas') for k, v in (self.cfg('datasets') or {}).items()
                    if isinstance(v, dict)}
        return ingest.load_manifest(path, check_files, canvases)

    def writer_ids(self, data):
        """the --writers selection, matched against the manifest ids;
        numeric ids match regardless of zero padding"""
        sel = self.kwargs.get('writers')
        if not sel:
            return None
        by_int = {int(w): w for w in data.writers if w.isdigit()}
        out = []
        for w in util.cslist(sel):
            if w in data.writers:
                out.append(w)
            elif w.isdigit() and int(w) in by_int:
                out.append(by_int[int(w)])
            else:
                raise err.InvalidArgument("writer", w, "not in dataset {}".format(data.name))
        return out

    def duplicator(self, passthrough=None):
        return ai.DuplicatorConfig(None, passthrough, self.cfg('augment.duplicator') or None,
                                   float(self.cfg('augment.min_period', ai.MIN_PERIOD)))

    def feature_mode(self):
        return self.kwargs.get('feature_mode') or self.cfg('augment.feature_mode', af.SMOOTH)

    def load_params(self, name):
        res = orchestrate.load_vector(name)
        dbg("parameters {}: {}".format(name, res.average))
        return res

    # -------------------------------------------------------------------------
    def run_record(self, outputs):
        return odict([
            ('schema', RUN_SCHEMA),
            ('command', self.command),
            ('args', _plain_args(self.kwargs)),
            ('seed', self.seed),
            ('config', self.configs.as_dict()),
            ('fingerprint', self.configs.fingerprint()),
            ('versions', versions()),
            ('created', util.timestamp()),
            ('outputs', list(outputs)),
        ])

    def write_run(self, out, outputs):
        """run.json in the output directory, or <out>.run.json beside an
        output file"""
        if osp.isdir(out):
            path = osp.join(out, 'run.json')
        else:
            path = osp.splitext(out)[0] + '.run.json'
        with open(path, 'w') as f:
            json.dump(self.run_record(outputs), f, indent=1)
            f.write("\n")
        dbg("wrote", path)
        return path

    # -------------------------------------------------------------------------
    def optimize(self):
        kw = self.kwargs
        kind = Kind.parse(kw['mode'])
        data = self.load_dataset()
        writers = orchestrate.writer_sets(data, kind, self.writer_ids(data))
        dup = self.duplicator() if kind == Kind.DUPLICATOR else None
        res = orchestrate.sigvar_optimize(
            writers, kind,
            n_per=int(kw.get('n_per') or self.cfg('optimize.n_per', 1)),
            iterations=int(kw.get('iterations') or self.cfg('swarm.iterations', 20)),
            swarm_size=int(kw.get('particles') or self.cfg('swarm.particles', 30)),
            seed=self.seed,
            on_error=kw.get('on_error') or self.cfg('optimize.on_error', orchestrate.SKIP),
            jobs=self.jobs, canvas=data.canvas, feature_mode=self.feature_mode(), duplicator=dup,
            fingerprint=self.configs.fingerprint())
        out = kw.get('out') or 'params.json'
        orchestrate.save_parameters(out, res)
        util.logdone("wrote {}".format(out))
        self.write_run(out, [out])
        return res

    def augment(self):
        kw = self.kwargs
        kind = Kind.parse(kw['mode'])
        res = self.load_params(kw['params'])
        if res.kind != kind:
            raise err.InvalidArgument("parameters", kw['params'],
                                      "holds {} parameters, not {}".format(res.kind.value, kind.value))
        count = int(kw.get('count') or 1)
        out = kw['out']
        if kind == Kind.DUPLICATOR:
            outputs = self._augment_images(kw['input'], res, count, out)
        else:
            outputs = self._augment_vectors(kw['input'], res, count, out)
        util.logdone("wrote {} files".format(len(outputs)))
        self.write_run(out, outputs)
        return outputs

    def _augment_images(self, inp, res, count, outdir):
        if osp.isdir(inp):
            files = sorted(f for f in glob.glob(osp.join(inp, '*'))
                           if f.lower().endswith(ingest.IMAGE_EXTENSIONS))
        else:
            files = [inp]
        if not files:
            raise err.DataError("no images found in {}", inp)
        os.makedirs(outdir, exist_ok=True)
        dup = self.duplicator(res.passthrough).with_variability(res.average)
        outputs = []
        for fn in files:
            stem = osp.splitext(osp.basename(fn))[0]
            rng = np.random.default_rng(util.derive_seed(self.seed, 'augment', stem))
            for k, img in enumerate(ai.duplicate(SignatureImage.load(fn), dup, count, rng)):
                path = osp.join(outdir, "{}_dup{:03d}.png".format(stem, k))
                img.save(path)
                outputs.append(path)
        return outputs

    def _augment_vectors(self, inp, res, count, out):
        records = []
        for r in c4features.read_store(inp):
            rng = np.random.default_rng(util.derive_seed(self.seed, 'augment', r.writer, r.sample, r.label))
            synth = af.perturb_features(r.vector, res.average, count, rng, self.feature_mode())
            records += [c4features.FeatureRecord(r.writer, "{}_{}".format(r.sample, k), r.label, v)
                        for k, v in enumerate(synth)]
        c4features.write_store(out, records)
        return [out]

    def sweep_sigma(self):
        kw = self.kwargs
        data = self.load_dataset()
        writers = orchestrate.writer_sets(data, Kind.GAUSSIAN, self.writer_ids(data))
        sigmas = util.float_grid(kw.get('sigma_grid') or "0.1:4.0:0.1")
        rows = orchestrate.sweep_sigma(writers, sigmas, int(kw.get('n_per') or 1), self.seed,
                                       self.feature_mode())
        out = kw.get('out') or 'curve.csv'
        with open(out, 'w') as f:
            w = csv.writer(f, lineterminator="\n")
            w.writerow(orchestrate.SweepRow._fields)
            for row in rows:
                w.writerow([row.writer, repr(row.sigma), repr(row.abs_silhouette)])
        util.logdone("wrote {} rows to {}".format(len(rows), out))
        self.write_run(out, [out])
        return rows

    def protocol_config(self, data, params=None):
        kw = self.kwargs
        ds = self.configs.dataset(data.dataset)
        gamma = kw.get('gamma')
        if gamma is None:
            gamma = self.cfg('verify.gamma')
        augment_negatives = self.cfg('verify.augment_negatives', True)
        if kw.get('no_augment_negatives'):
            augment_negatives = False
        dup = None
        if params is not None and params.kind == Kind.DUPLICATOR:
            dup = self.duplicator(params.passthrough)
        return evaluate.ProtocolConfig(
            r_values=util.int_range(kw.get('r') or "1"),
            d_values=util.int_range(kw.get('d') or "0"),
            reps=int(kw.get('reps') or self.cfg('evaluate.reps', 10)),
            seed=self.seed,
            split=ingest.SplitConfig.from_dict(ds),
            params=None if params is None else params.average,
            duplicator=dup,
            feature_mode=self.feature_mode(),
            augment_negatives=augment_negatives,
            gamma=None if gamma is None else float(gamma),
            tol=float(self.cfg('verify.tol', 1e-3)),
            max_iter=int(self.cfg('verify.max_iter', 200000)),
            cache_mb=float(self.cfg('verify.cache_mb', 256)),
            threshold=kw.get('threshold') or self.cfg('evaluate.threshold', evaluate.GLOBAL),
            jobs=self.jobs)

    def evaluate(self):
        kw = self.kwargs
        data = self.load_dataset()
        params = self.load_params(kw['params']) if kw.get('params') else None
        cfg = self.protocol_config(data, params)
        if kw.get('select_gamma'):
            cands = util.float_grid(kw['select_gamma'])
            cfg.gamma = evaluate.select_gamma(cands, data, cfg)
            util.lognotice("selected gamma={:.6g}".format(cfg.gamma))
        report = evaluate.run_protocol(cfg, data)
        out = kw.get('out') or 'report'
        paths = evaluate.write_report(report, out, chart=not kw.get('no_chart'))
        for s in report.summary():
            util.log("r={} d={}: EER {:.2f}% +- {:.2f}".format(s['r'], s['d'], 100. * s['eer_mean'],
                                                              100. * s['eer_std']))
        self.write_run(out, list(paths.values()))
        return report

    def validate_features(self):
        kw = self.kwargs
        data = self.load_dataset()
        names = [n for n in (kw.get('params_a'), kw.get('params_b')) if n]
        names += list(kw.get('params') or [])
        if not names:
            raise err.InvalidArgument("parameters", names, "give at least one with --params-a")
        vectors = odict()
        dup = None
        for n in names:
            res = self.load_params(n)
            label = osp.splitext(osp.basename(n))[0]
            vectors[label] = res.average
            if res.kind == Kind.DUPLICATOR and dup is None:
                dup = self.duplicator(res.passthrough)
        kind = Kind.DUPLICATOR if any(v.kind == Kind.DUPLICATOR for v in vectors.values()) else Kind.GAUSSIAN
        writers = orchestrate.writer_sets(data, kind, self.writer_ids(data))
        rows = orchestrate.validate_features(writers, vectors, int(kw.get('n_per') or 1), self.seed,
                                             self.feature_mode(), data.canvas, duplicator=dup)
        fmt = "{:20s} {:>8} {:>18} {:>24}"
        util.log(fmt.format("parameters", "writers", "|silhouette|", "cohesion"))
        for r in rows:
            util.log(fmt.format(r.name, r.writers, "{:.4f} +- {:.4f}".format(r.abs_mean, r.abs_std),
                                "{:.4f} +- {:.4f}".format(r.cohesion_mean, r.cohesion_std)))
        out = kw.get('out')
        if out:
            with open(out, 'w') as f:
                w = csv.writer(f, lineterminator="\n")
                w.writerow(orchestrate.FeatureValidation._fields)
                for r in rows:
                    w.writerow([r.name, r.writers] + [repr(v) for v in r[2:]])
            self.write_run(out, [out])
        return rows

    def manifest(self):
        kw = self.kwargs
        dataset = kw.get('dataset') or 'auto'
        canvas = [int(c) for c in util.cslist(kw['canvas'])] if kw.get('canvas') else None
        m = ingest.generate_manifest(kw['root'], kw.get('name'), dataset, canvas,
                                     development=util.cslist(kw.get('development') or ""))
        if canvas is None:
            ds = self.cfg('datasets.' + str(m['dataset']))
            if ds is None:
                raise err.InvalidArgument("canvas", None, "no canvas for dataset {}: give --canvas H,W".format(
                    m['dataset']))
            m['canvas'] = list(ds['canvas'])
            m.move_to_end('writers')
        out = kw.get('out') or osp.join(kw['root'], 'manifest.json')
        ingest.write_manifest(m, out)
        # fail now rather than at the first experiment
        ingest.load_manifest(out)
        util.logdone("wrote {}: {} writers".format(out, len(m['writers'])))
        return out

    def synthesize(self):
        kw = self.kwargs
        out = kw['outdir']
        ds = self.configs.dataset('synthetic')
        writers = int(kw.get('writers') or 20)
        genuine = int(kw.get('genuine') or ds.get('genuine', 8))
        skilled = int(kw.get('skilled') if kw.get('skilled') is not None else ds.get('skilled', 4))
        if kw.get('vectors'):
            path = synthetic.make_feature_dataset(out, writers, genuine, skilled, int(kw.get('dim') or 32),
                                                  self.seed)
        else:
            path = synthetic.make_dataset(out, writers, genuine, skilled, self.seed,
                                          canvas=tuple(ds.get('canvas', synthetic.CANVAS)),
                                          development=int(kw.get('development') or 0))
        self.write_run(out, [path])
        return path


# -----------------------------------------------------------------------------
def load_run(path):
    try:
        with open(path) as f:
            rec = json.load(f, object_pairs_hook=odict)
    except FileNotFoundError:
        raise err.ConfigFileNotFound(path)
    except json.JSONDecodeError as e:
        raise err.ParseError(path, "line {}".format(e.lineno), e.msg)
    schema = rec.get('schema')
    if not isinstance(schema, int) or schema > RUN_SCHEMA:
        raise err.SchemaVersionError(path, schema, RUN_SCHEMA)
    for k in ('command', 'args', 'config', 'seed'):
        if k not in rec:
            raise err.ParseError(path, k, "missing from the run record")
    return rec


def replay(path, out=None, jobs=None, config_dir=None):
    """re-run a recorded run with its recorded configuration and seed.
    Returns the Session that ran."""
    rec = load_run(path)
    kwargs = dict(rec['args'])
    config_dir = config_dir or (out if out and osp.isdir(out) else osp.dirname(osp.abspath(path)))
    cfg_file = osp.join(config_dir, 'replay.yml')
    c = conf.Configs()
    for k, v in conf.plain(rec['config']).items():
        c.set_val(k, v)
    c.save(cfg_file)
    kwargs.update(config=[cfg_file], no_default_config=True, seed=rec['seed'])
    if out is not None:
        kwargs['out' if 'out' in kwargs else 'outdir'] = out
    if jobs is not None:
        kwargs['jobs'] = jobs
    # the recorded seed wins over the environment
    saved = os.environ.pop(SEED_ENV, None)
    try:
        s = Session(**kwargs)
        getattr(s, rec['command'])()
    finally:
        if saved is not None:
            os.environ[SEED_ENV] = saved
    util.logdone("replayed {}".format(path))
    return s
