"""Dataset manifests: writers with their genuine signatures and skilled
forgeries, and the per-repetition train/test split.

A manifest is JSON:

    {"name": "mcyt75", "dataset": "mcyt", "canvas": [600, 850],
     "declared": {"genuine": 15, "skilled": 15},
     "features": "signet.txt",
     "writers": [{"id": "0001", "role": "exploitation",
                  "genuine": ["0001/0001v00.png", ...],
                  "skilled": ["0001/0001f00.png", ...]}, ...]}

Paths are relative to the manifest. "features" (optional) names a
feature-vector store holding precomputed vectors of the same writers;
"declared" and "role" are optional. Development writers only ever act
as random forgeries.
"""

import os
import os.path as osp
import re
import json
from collections import OrderedDict as odict
from collections import namedtuple

import numpy as np

from .named_item import NamedItem
from .image import SignatureImage
from . import features as c4features
from . import util
from . import err


GENUINE = 'genuine'
SKILLED = 'skilled'

EXPLOITATION = 'exploitation'
DEVELOPMENT = 'development'
ROLES = (EXPLOITATION, DEVELOPMENT)

IMAGE_EXTENSIONS = ('.png', '.bmp', '.tif', '.tiff', '.jpg', '.jpeg', '.pgm')

# file naming conventions: (genuine, forgery) patterns capturing
# (writer, sample)
CONVENTIONS = odict([
    ('gpds', (re.compile(r'^c-(\d+)-(\d+)\.\w+$'), re.compile(r'^cf-(\d+)-(\d+)\.\w+$'))),
    ('cedar', (re.compile(r'^original_(\d+)_(\d+)\.\w+$'), re.compile(r'^forgeries_(\d+)_(\d+)\.\w+$'))),
    ('mcyt', (re.compile(r'^(\d+)v(\d+)\.\w+$'), re.compile(r'^(\d+)f(\d+)\.\w+$'))),
])


class SampleRef(namedtuple('SampleRef', ['writer', 'kind', 'index'])):
    """one sample of the dataset: the index-th genuine or skilled sample
    of a writer"""

    @property
    def key(self):
        return "{}/{}/{}".format(self.writer, self.kind, self.index)


class WriterEntry(NamedItem):

    def __init__(self, id, genuine=(), skilled=(), role=EXPLOITATION):
        super().__init__(id)
        self.id = str(id)
        self.genuine = list(genuine)
        self.skilled = list(skilled)
        if role not in ROLES:
            raise err.InvalidArgument("writer role", role, "use {}".format("|".join(ROLES)))
        self.role = role


class DatasetHandle(NamedItem):

    def __init__(self, name, dataset, canvas, writers, declared=None, vectors=None, path=None):
        super().__init__(name)
        self.dataset = dataset
        self.canvas = tuple(int(c) for c in canvas) if canvas is not None else None
        self.writers = odict((w.id, w) for w in writers)
        self.declared = dict(declared or {})
        # writer -> {GENUINE: (n, D) array, SKILLED: (m, D) array}
        self.vectors = vectors
        self.path = path

    def exploitation(self):
        return [w for w in self.writers.values() if w.role == EXPLOITATION]

    def development(self):
        return [w for w in self.writers.values() if w.role == DEVELOPMENT]

    @property
    def has_images(self):
        return any(w.genuine for w in self.writers.values())

    @property
    def has_vectors(self):
        return self.vectors is not None

    def count(self, writer, kind=GENUINE):
        w = self.writers[writer]
        paths = w.genuine if kind == GENUINE else w.skilled
        if paths:
            return len(paths)
        if self.vectors is not None and writer in self.vectors:
            return len(self.vectors[writer][kind])
        return 0

    def refs(self, writer, kind=GENUINE):
        return [SampleRef(writer, kind, i) for i in range(self.count(writer, kind))]

    def image(self, ref):
        w = self.writers[ref.writer]
        paths = w.genuine if ref.kind == GENUINE else w.skilled
        return SignatureImage.load(paths[ref.index])

    def vector(self, ref):
        try:
            return self.vectors[ref.writer][ref.kind][ref.index]
        except (KeyError, IndexError, TypeError):
            raise err.DataError("dataset {}: no stored vector for {}", self.name, ref.key)


# -----------------------------------------------------------------------------
def load_manifest(path, check_files=True, canvases=None):
    """load and validate a manifest. canvases maps dataset names to the
    canvas of manifests which do not give one."""
    try:
        with open(path, 'r') as f:
            d = json.load(f)
    except FileNotFoundError:
        raise err.ManifestError(path, "file not found")
    except json.JSONDecodeError as e:
        raise err.ParseError(path, "line {}".format(e.lineno), e.msg)
    except UnicodeDecodeError:
        raise err.ManifestError(path, "not a text file")
    except OSError as e:
        raise err.UnreadableFile(path, e.strerror or str(e))
    return manifest_from_dict(d, path, check_files, canvases)


def manifest_from_dict(d, path="<manifest>", check_files=True, canvases=None):
    base = osp.dirname(osp.abspath(path)) if path != "<manifest>" else os.getcwd()
    if not isinstance(d, dict) or not isinstance(d.get('writers'), list):
        raise err.ManifestError(path, "expected an object with a 'writers' list")
    canvas = d.get('canvas') or (canvases or {}).get(d.get('dataset'))
    if canvas is None or len(canvas) != 2:
        raise err.ManifestError(path, "no canvas [height, width] given")
    declared = d.get('declared') or {}
    vectors = None
    if d.get('features'):
        vectors = _load_vectors(osp.join(base, d['features']))
    writers = []
    seen = set()
    for wd in d['writers']:
        wid = str(wd.get('id', ''))
        if not wid:
            raise err.ManifestError(path, "writer without an id")
        if wid in seen:
            raise err.DuplicateId(path, wid)
        seen.add(wid)
        gen = [osp.join(base, p) for p in wd.get('genuine', [])]
        skl = [osp.join(base, p) for p in wd.get('skilled', [])]
        if check_files:
            for p in gen + skl:
                if not osp.exists(p):
                    raise err.MissingFile(path, wid, p)
        writers.append(WriterEntry(wid, gen, skl, wd.get('role', EXPLOITATION)))
    h = DatasetHandle(d.get('name', osp.splitext(osp.basename(path))[0]),
                      d.get('dataset', 'generic'), canvas, writers, declared, vectors, path)
    for w in writers:
        if vectors is not None and not w.genuine and w.id not in vectors:
            raise err.ManifestError(path, "writer {} has neither images nor vectors", w.id)
        for kind in (GENUINE, SKILLED):
            want = declared.get(kind)
            if want is not None and h.count(w.id, kind) != want:
                raise err.CountMismatch(path, w.id, kind, want, h.count(w.id, kind))
    util.logdbg("manifest {}: {} writers".format(path, len(writers)))
    return h


def _load_vectors(store):
    if not osp.exists(store):
        raise err.ManifestError(store, "feature store not found")
    out = odict()
    for r in c4features.read_store(store):
        kind = {c4features.GENUINE: GENUINE, c4features.SKILLED: SKILLED}.get(r.label)
        if kind is None:
            continue
        out.setdefault(r.writer, {GENUINE: [], SKILLED: []})[kind].append(r.vector)
    return odict((w, {k: np.array(v) for k, v in kinds.items()}) for w, kinds in out.items())


def _writer_key(wid):
    return (0, int(wid), wid) if wid.isdigit() else (1, 0, wid)


def generate_manifest(root, name=None, dataset='auto', canvas=None, declared=None, development=()):
    """build a manifest from a directory tree: either
    <writer>/genuine/*.png and <writer>/skilled/*.png, or any tree of files
    named after the gpds, cedar or mcyt conventions. Paths are relative
    to root, where the manifest is meant to be written."""
    files = []
    for dirpath, dirnames, filenames in os.walk(root):
        dirnames.sort()
        for fn in sorted(filenames):
            if fn.lower().endswith(IMAGE_EXTENSIONS):
                files.append(osp.relpath(osp.join(dirpath, fn), root))
    found = odict()

    def add(wid, kind, rel, sample):
        w = found.setdefault(wid, {GENUINE: [], SKILLED: []})
        w[kind].append((sample, rel))

    conventions = list(CONVENTIONS.items()) if dataset == 'auto' else \
        [(k, v) for k, v in CONVENTIONS.items() if k == dataset]
    used = None
    for rel in files:
        parts = rel.replace('\\', '/').split('/')
        if len(parts) >= 3 and parts[-2] in (GENUINE, SKILLED) and dataset in ('auto', 'generic', 'synthetic'):
            add(parts[-3], parts[-2], rel, parts[-1])
            used = used or 'generic'
            continue
        for conv, (g, f) in conventions:
            m = g.match(parts[-1])
            kind = GENUINE
            if not m:
                m = f.match(parts[-1])
                kind = SKILLED
            if m:
                add(m.group(1), kind, rel, int(m.group(2)))
                used = used or conv
                break
    if not found:
        raise err.ManifestError(root, "no signature images found")
    if dataset == 'auto':
        dataset = used
    dev = set(str(w) for w in development)
    writers = []
    for wid in sorted(found, key=_writer_key):
        kinds = found[wid]
        writers.append(odict([
            ('id', wid),
            ('role', DEVELOPMENT if wid in dev else EXPLOITATION),
            (GENUINE, [rel for _, rel in sorted(kinds[GENUINE], key=lambda s: (str(type(s[0])), s[0]))]),
            (SKILLED, [rel for _, rel in sorted(kinds[SKILLED], key=lambda s: (str(type(s[0])), s[0]))]),
        ]))
    m = odict([('name', name or osp.basename(osp.abspath(root))), ('dataset', dataset)])
    if canvas is not None:
        m['canvas'] = list(canvas)
    if declared:
        m['declared'] = dict(declared)
    m['writers'] = writers
    return m


def write_manifest(m, path):
    with open(path, 'w') as f:
        json.dump(m, f, indent=1)
        f.write("\n")


# -----------------------------------------------------------------------------
class SplitConfig:
    """per evaluated writer: random forgeries for training drawn from
    random_writers donors (0: every donor) times random_per_writer
    signatures each; test_* samples for testing"""

    fields = ('random_writers', 'random_per_writer', 'test_genuine', 'test_random', 'test_skilled')

    def __init__(self, random_writers=0, random_per_writer=1, test_genuine=1, test_random=0,
                 test_skilled=0):
        self.random_writers = int(random_writers)
        self.random_per_writer = int(random_per_writer)
        self.test_genuine = int(test_genuine)
        self.test_random = int(test_random)
        self.test_skilled = int(test_skilled)

    @staticmethod
    def from_dict(d):
        return SplitConfig(**{k: d[k] for k in SplitConfig.fields if k in d})

    def as_dict(self):
        return odict((k, getattr(self, k)) for k in self.fields)


WriterSplit = namedtuple('WriterSplit', ['writer', 'train_genuine', 'train_random',
                                         'test_genuine', 'test_skilled', 'test_random'])


def split(data, r, rng, cfg):
    """one repetition's selection. Returns an ordered map of evaluated
    writer -> WriterSplit. Random forgeries come from the development
    writers when there are any, from the other evaluated writers
    otherwise."""
    if r < 1:
        raise err.InvalidArgument("training genuine count", r, "need at least 1")
    evaluated = data.exploitation()
    development = data.development()
    out = odict()
    for w in evaluated:
        ng = data.count(w.id, GENUINE)
        if ng < r + cfg.test_genuine:
            raise err.InsufficientSamples(w.id, "genuine signatures", r + cfg.test_genuine, ng)
        ns = data.count(w.id, SKILLED)
        if ns < cfg.test_skilled:
            raise err.InsufficientSamples(w.id, "skilled forgeries", cfg.test_skilled, ns)
        perm = rng.permutation(ng)
        train_g = [SampleRef(w.id, GENUINE, int(i)) for i in perm[:r]]
        test_g = [SampleRef(w.id, GENUINE, int(i)) for i in perm[r:r + cfg.test_genuine]]
        test_s = []
        if cfg.test_skilled:
            test_s = [SampleRef(w.id, SKILLED, int(i))
                      for i in rng.choice(ns, cfg.test_skilled, replace=False)]
        # random forgeries for training
        pool = development if development else [o for o in evaluated if o.id != w.id]
        if cfg.random_per_writer and not pool:
            raise err.InsufficientSamples(w.id, "random-forgery donors", 1, 0)
        if cfg.random_writers and len(pool) > cfg.random_writers:
            pool = [pool[int(i)] for i in sorted(rng.choice(len(pool), cfg.random_writers, replace=False))]
        train_r = []
        for donor in pool:
            nd = data.count(donor.id, GENUINE)
            if nd < cfg.random_per_writer:
                raise err.InsufficientSamples(donor.id, "genuine signatures to act as random forgeries",
                                              cfg.random_per_writer, nd)
            train_r += [SampleRef(donor.id, GENUINE, int(i))
                        for i in rng.choice(nd, cfg.random_per_writer, replace=False)]
        # random forgeries for testing: other evaluated writers, never
        # one already used for training
        test_r = []
        if cfg.test_random:
            used = set(train_r)
            cands = [ref for o in evaluated if o.id != w.id
                     for ref in data.refs(o.id, GENUINE) if ref not in used]
            if len(cands) < cfg.test_random:
                raise err.InsufficientSamples(w.id, "random forgeries for testing", cfg.test_random, len(cands))
            test_r = [cands[int(i)] for i in rng.choice(len(cands), cfg.test_random, replace=False)]
        out[w.id] = WriterSplit(w.id, train_g, train_r, test_g, test_s, test_r)
    return out
