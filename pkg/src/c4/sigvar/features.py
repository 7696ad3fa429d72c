"""Feature extraction and feature-vector stores.

The baseline extractor is a grid descriptor standing in for a CNN. Vectors
computed elsewhere (eg 2048-d CNN activations) come in through the store
formats:

    text:   dim=<D>
            writer_id,sample_id,label,v1,...,vD
    binary: b'SVFV' <u32 D> <u32 count>
            count * (<u32 writer> <u32 sample> <u32 label> <f64 * D>)

all little-endian; label is one of genuine, forgery_skilled,
forgery_random (codes 0, 1, 2 in the binary variant).
"""

import struct
from collections import OrderedDict as odict
from collections import namedtuple

import numpy as np

from .image import Polarity
from . import preprocess
from . import err


GENUINE = 'genuine'
SKILLED = 'forgery_skilled'
RANDOM = 'forgery_random'
LABELS = (GENUINE, SKILLED, RANDOM)

MAGIC = b'SVFV'

FeatureRecord = namedtuple('FeatureRecord', ['writer', 'sample', 'label', 'vector'])


class GridDescriptor:
    """per cell of a 10x11 grid of 15x20 cells: mean intensity, intensity
    standard deviation, ink fraction, and the ink centroid x and y offsets
    from the cell center (in half-cell units). Intensities are scaled to
    [0, 1]. The vector is laid out statistic by statistic, each a
    row-major grid."""

    rows, cols = 10, 11
    cell = (15, 20)
    stats = ('mean', 'std', 'ink', 'cx', 'cy')

    @property
    def dim(self):
        return self.rows * self.cols * len(self.stats)

    def __call__(self, img):
        return self.extract(img)

    def extract(self, img):
        if img.shape != preprocess.CROPPED:
            raise err.ImageSizeError("{}x{}".format(*preprocess.CROPPED), img.shape)
        if img.polarity != Polarity.INK_LIGHT:
            raise err.PolarityError(Polarity.INK_LIGHT.value, img.polarity.value)
        ch, cw = self.cell
        p = img.pixels.astype(np.float64) / 255.
        cells = p.reshape(self.rows, ch, self.cols, cw).transpose(0, 2, 1, 3)
        mean = cells.mean(axis=(2, 3))
        std = cells.std(axis=(2, 3))
        ink = (cells > 0).mean(axis=(2, 3))
        mass = cells.sum(axis=(2, 3))
        ys = (np.arange(ch) - (ch - 1) / 2.) / (ch / 2.)
        xs = (np.arange(cw) - (cw - 1) / 2.) / (cw / 2.)
        with np.errstate(invalid='ignore', divide='ignore'):
            cy = np.where(mass > 0, (cells.sum(axis=3) @ ys) / np.where(mass > 0, mass, 1.), 0.)
            cx = np.where(mass > 0, (cells.sum(axis=2) @ xs) / np.where(mass > 0, mass, 1.), 0.)
        return np.concatenate([mean.ravel(), std.ravel(), ink.ravel(), cx.ravel(), cy.ravel()])


_default_extractor = GridDescriptor()


def extract(img):
    return _default_extractor.extract(img)


# -----------------------------------------------------------------------------
def write_store(path, records, binary=False):
    records = list(records)
    dims = {len(r.vector) for r in records}
    if len(dims) > 1:
        raise err.DimensionMismatch(min(dims), max(dims), "store")
    dim = dims.pop() if dims else 0
    if binary:
        _write_binary(path, records, dim)
    else:
        with open(path, 'w') as f:
            f.write("dim={}\n".format(dim))
            for r in records:
                _check_label(path, r.label, "record {}/{}".format(r.writer, r.sample))
                vals = ",".join(repr(float(v)) for v in r.vector)
                f.write("{},{},{},{}\n".format(r.writer, r.sample, r.label, vals))


def _check_label(path, label, where):
    if label not in LABELS:
        raise err.ParseError(path, where, "bad label '{}', expected one of {}".format(label, LABELS))


def _write_binary(path, records, dim):
    with open(path, 'wb') as f:
        f.write(MAGIC)
        f.write(struct.pack('<II', dim, len(records)))
        for r in records:
            _check_label(path, r.label, "record {}/{}".format(r.writer, r.sample))
            try:
                ids = struct.pack('<III', int(r.writer), int(r.sample), LABELS.index(r.label))
            except (ValueError, struct.error):
                raise err.InvalidArgument("binary store ids", (r.writer, r.sample),
                                          "must be unsigned 32-bit integers")
            f.write(ids)
            f.write(np.asarray(r.vector, dtype='<f8').tobytes())


def read_store(path):
    """all records of a store, text or binary"""
    try:
        with open(path, 'rb') as f:
            head = f.read(len(MAGIC))
        if head == MAGIC:
            return _read_binary(path)
        return _read_text(path)
    except FileNotFoundError:
        raise err.UnreadableFile(path, "file not found")
    except UnicodeDecodeError:
        raise err.ParseError(path, "text", "not a feature store")
    except OSError as e:
        raise err.UnreadableFile(path, e.strerror or str(e))


def _read_text(path):
    out = []
    with open(path, 'r') as f:
        first = f.readline().strip()
        if not first.startswith('dim='):
            raise err.ParseError(path, "line 1", "expected 'dim=<D>'")
        try:
            dim = int(first[4:])
        except ValueError:
            raise err.ParseError(path, "line 1", "bad dimension '{}'".format(first[4:]))
        for lineno, line in enumerate(f, 2):
            line = line.strip()
            if not line:
                continue
            fields = line.split(',')
            where = "line {}".format(lineno)
            if len(fields) < 3:
                raise err.ParseError(path, where, "expected writer_id,sample_id,label,values")
            writer, sample, label = fields[0], fields[1], fields[2]
            _check_label(path, label, where)
            if len(fields) - 3 != dim:
                raise err.ParseError(path, where, "record {}/{}: expected {} values, got {}".format(
                    writer, sample, dim, len(fields) - 3))
            try:
                v = np.array([float(x) for x in fields[3:]], dtype=np.float64)
            except ValueError as e:
                raise err.ParseError(path, where, str(e))
            if not np.all(np.isfinite(v)):
                raise err.NonFiniteValue(path, where)
            out.append(FeatureRecord(writer, sample, label, v))
    return out


def _read_binary(path):
    with open(path, 'rb') as f:
        data = f.read()
    off = len(MAGIC)
    if len(data) < off + 8:
        raise err.ParseError(path, "header", "truncated")
    dim, count = struct.unpack_from('<II', data, off)
    off += 8
    recsize = 12 + 8 * dim
    if len(data) != off + count * recsize:
        raise err.ParseError(path, "header", "expected {} records of dimension {} ({} bytes), got {} bytes".format(
            count, dim, off + count * recsize, len(data)))
    out = []
    for i in range(count):
        where = "record {}".format(i)
        w, s, code = struct.unpack_from('<III', data, off)
        if code >= len(LABELS):
            raise err.ParseError(path, where, "bad label code {}".format(code))
        v = np.frombuffer(data, dtype='<f8', count=dim, offset=off + 12).astype(np.float64)
        if not np.all(np.isfinite(v)):
            raise err.NonFiniteValue(path, where)
        out.append(FeatureRecord(str(w), str(s), LABELS[code], v))
        off += recsize
    return out


def load_precomputed(path, label=None):
    """map writer id -> (n, D) array of its vectors, in file order. With
    a label, only the records of that label."""
    out = odict()
    for r in read_store(path):
        if label is not None and r.label != label:
            continue
        out.setdefault(r.writer, []).append(r.vector)
    return odict((w, np.array(v)) for w, v in out.items())


def records_of(vectors_by_writer, label=GENUINE):
    """the inverse of load_precomputed for one label"""
    for w, vs in vectors_by_writer.items():
        for i, v in enumerate(vs):
            yield FeatureRecord(str(w), str(i), label, np.asarray(v, dtype=np.float64))
