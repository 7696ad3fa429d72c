"""Writer-dependent verification: an RBF-kernel SVM trained by
sequential minimal optimization, genuine samples against random
forgeries, with the positive cost scaled by the class skew.

Classifier files:

    text:   sigvar-classifier version=1
            gamma=<g>
            bias=<b>
            dim=<D>
            count=<n>
            then n lines coef,v1,...,vD
    binary: b'SVCL' <u32 version> <u32 D> <u32 n> <f64 gamma> <f64 bias>
            n * (<f64 coef> <f64 * D>)
"""

import struct
from collections import OrderedDict as odict

import numpy as np
from scipy.spatial.distance import cdist

from . import metrics
from . import util
from . import err


TAU = 1e-12
VERSION = 1
MAGIC = b'SVCL'

DEFAULT_TOL = 1e-3
DEFAULT_MAX_ITER = 200000
DEFAULT_CACHE_MB = 256


def class_weights(p_count, n_count):
    """(C+, C-): C- is 1 and C+ is the skew N/P"""
    if p_count < 1 or n_count < 1:
        raise err.InvalidArgument("class counts", (p_count, n_count), "both must be at least 1")
    c_minus = 1.
    psi = n_count / p_count
    return psi * c_minus, c_minus


def default_gamma(vectors):
    """1 / (D * mean feature variance)"""
    x = metrics.as_vectors(vectors)
    var = float(x.var(axis=0).mean()) if x.shape[0] else 0.
    if var <= 0.:
        return 1. / x.shape[1]
    return 1. / (x.shape[1] * var)


def rbf(a, b, gamma):
    return np.exp(-gamma * cdist(a, b, 'sqeuclidean'))


class TrainingSet:

    def __init__(self, positives, negatives):
        self.positives = metrics.as_vectors(positives)
        self.negatives = metrics.as_vectors(negatives)
        if len(self.positives) == 0 or len(self.negatives) == 0:
            raise err.InvalidArgument("training set", (len(self.positives), len(self.negatives)),
                                      "need positives and negatives")
        if self.positives.shape[1] != self.negatives.shape[1]:
            raise err.DimensionMismatch(self.positives.shape[1], self.negatives.shape[1])

    @property
    def dim(self):
        return self.positives.shape[1]

    def data(self):
        """(X, y) with the positives first"""
        x = np.concatenate([self.positives, self.negatives])
        y = np.concatenate([np.ones(len(self.positives)), -np.ones(len(self.negatives))])
        return x, y


# -----------------------------------------------------------------------------
class KernelCache:
    """rows of the kernel matrix. The whole matrix is computed upfront
    when it fits the budget; otherwise rows are computed on demand and
    kept in least-recently-used order."""

    def __init__(self, x, gamma, cache_mb=DEFAULT_CACHE_MB):
        self.x = x
        self.gamma = gamma
        n = x.shape[0]
        budget = int(cache_mb * 2**20)
        self.full = None
        self.rows = odict()
        if n * n * 8 <= budget:
            self.full = rbf(x, x, gamma)
            self.max_rows = n
        else:
            self.max_rows = max(2, budget // (8 * n))
            util.logdbg("kernel cache: {} of {} rows".format(self.max_rows, n))

    def row(self, i):
        if self.full is not None:
            return self.full[i]
        r = self.rows.get(i)
        if r is not None:
            self.rows.move_to_end(i)
            return r
        r = rbf(self.x[i:i + 1], self.x, self.gamma)[0]
        self.rows[i] = r
        if len(self.rows) > self.max_rows:
            self.rows.popitem(last=False)
        return r


# -----------------------------------------------------------------------------
class Classifier:
    """decision(v) = sum_i coef_i K(sv_i, v) + bias; positive is genuine"""

    def __init__(self, gamma, support_vectors, coefs, bias, name=None):
        self.gamma = float(gamma)
        self.support_vectors = metrics.as_vectors(support_vectors)
        self.coefs = np.asarray(coefs, dtype=np.float64)
        self.bias = float(bias)
        self.name = name
        # training diagnostics, not serialized
        self.iterations = None
        self.violation = None
        self.objective = None
        self.alphas = None

    @property
    def dim(self):
        return self.support_vectors.shape[1]

    def scores(self, vectors):
        v = metrics.as_vectors(vectors)
        if v.shape[1] != self.dim:
            raise err.DimensionMismatch(self.dim, v.shape[1])
        if len(self.coefs) == 0:
            return np.full(v.shape[0], self.bias)
        return rbf(v, self.support_vectors, self.gamma) @ self.coefs + self.bias


def decision_score(c, v):
    v = np.asarray(v, dtype=np.float64).ravel()
    if v.shape[0] != c.dim:
        raise err.DimensionMismatch(c.dim, v.shape[0])
    return float(c.scores(v.reshape(1, -1))[0])


def decision_scores(c, vectors):
    return c.scores(vectors)


# -----------------------------------------------------------------------------
def smo(kc, y, cost, tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER):
    """solve min 1/2 a'Qa - e'a, 0 <= a <= cost, y'a = 0, Q = yy'K, with
    maximal-violating-pair working sets. Returns (alpha, gradient, bias,
    iterations, violation)."""
    n = y.shape[0]
    alpha = np.zeros(n)
    grad = -np.ones(n)
    it = 0
    while True:
        yg = -y * grad
        up = ((y > 0) & (alpha < cost)) | ((y < 0) & (alpha > 0))
        low = ((y > 0) & (alpha > 0)) | ((y < 0) & (alpha < cost))
        i = int(np.argmax(np.where(up, yg, -np.inf)))
        j = int(np.argmin(np.where(low, yg, np.inf)))
        violation = (yg[i] if up[i] else -np.inf) - (yg[j] if low[j] else np.inf)
        if not violation > tol:
            violation = max(violation, 0.)
            break
        if it >= max_iter:
            raise err.SvmNotConverged(it, violation, tol)
        it += 1
        ki, kj = kc.row(i), kc.row(j)
        qi = y[i] * y * ki
        qj = y[j] * y * kj
        ci, cj = cost[i], cost[j]
        old_i, old_j = alpha[i], alpha[j]
        if y[i] != y[j]:
            quad = ki[i] + kj[j] + 2. * qi[j]
            if quad <= 0:
                quad = TAU
            delta = (-grad[i] - grad[j]) / quad
            diff = alpha[i] - alpha[j]
            alpha[i] += delta
            alpha[j] += delta
            if diff > 0:
                if alpha[j] < 0:
                    alpha[j] = 0
                    alpha[i] = diff
            else:
                if alpha[i] < 0:
                    alpha[i] = 0
                    alpha[j] = -diff
            if diff > ci - cj:
                if alpha[i] > ci:
                    alpha[i] = ci
                    alpha[j] = ci - diff
            else:
                if alpha[j] > cj:
                    alpha[j] = cj
                    alpha[i] = cj + diff
        else:
            quad = ki[i] + kj[j] - 2. * qi[j]
            if quad <= 0:
                quad = TAU
            delta = (grad[i] - grad[j]) / quad
            total = alpha[i] + alpha[j]
            alpha[i] -= delta
            alpha[j] += delta
            if total > ci:
                if alpha[i] > ci:
                    alpha[i] = ci
                    alpha[j] = total - ci
            else:
                if alpha[j] < 0:
                    alpha[j] = 0
                    alpha[i] = total
            if total > cj:
                if alpha[j] > cj:
                    alpha[j] = cj
                    alpha[i] = total - cj
            else:
                if alpha[i] < 0:
                    alpha[i] = 0
                    alpha[j] = total
        grad += qi * (alpha[i] - old_i) + qj * (alpha[j] - old_j)
    return alpha, grad, _bias(alpha, grad, y, cost), it, violation


def _bias(alpha, grad, y, cost):
    """-rho: the mean of y*grad over the free vectors, or the middle of
    the feasible interval when there are none"""
    yg = y * grad
    at_ub = alpha >= cost
    at_lb = alpha <= 0
    free = ~(at_ub | at_lb)
    if free.any():
        return -float(yg[free].mean())
    ub_mask = (at_ub & (y < 0)) | (at_lb & (y > 0))
    lb_mask = (at_ub & (y > 0)) | (at_lb & (y < 0))
    ub = yg[ub_mask].min() if ub_mask.any() else np.inf
    lb = yg[lb_mask].max() if lb_mask.any() else -np.inf
    return -float((ub + lb) / 2.)


def train_wd_classifier(ts, gamma, tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER,
                        cache_mb=DEFAULT_CACHE_MB, name=None):
    if not gamma > 0:
        raise err.InvalidArgument("gamma", gamma, "must be positive")
    x, y = ts.data()
    c_plus, c_minus = class_weights(len(ts.positives), len(ts.negatives))
    cost = np.where(y > 0, c_plus, c_minus)
    kc = KernelCache(x, gamma, cache_mb)
    alpha, grad, bias, it, violation = smo(kc, y, cost, tol, max_iter)
    sv = alpha > 0
    c = Classifier(gamma, x[sv], (alpha * y)[sv], bias, name)
    c.iterations = it
    c.violation = violation
    c.objective = float(0.5 * alpha @ (grad - 1.))
    c.alphas = alpha
    util.logdbg("svm {}: {} iterations, {} support vectors, violation {:.3g}".format(
        name or "", it, int(sv.sum()), violation))
    return c


# -----------------------------------------------------------------------------
def save_classifier(path, c, binary=False):
    if binary:
        with open(path, 'wb') as f:
            f.write(MAGIC)
            f.write(struct.pack('<IIIdd', VERSION, c.dim, len(c.coefs), c.gamma, c.bias))
            for coef, v in zip(c.coefs, c.support_vectors):
                f.write(struct.pack('<d', coef))
                f.write(np.asarray(v, dtype='<f8').tobytes())
        return
    with open(path, 'w') as f:
        f.write("sigvar-classifier version={}\n".format(VERSION))
        f.write("gamma={!r}\n".format(c.gamma))
        f.write("bias={!r}\n".format(c.bias))
        f.write("dim={}\n".format(c.dim))
        f.write("count={}\n".format(len(c.coefs)))
        for coef, v in zip(c.coefs, c.support_vectors):
            f.write(",".join(repr(float(x)) for x in [coef] + list(v)) + "\n")


def load_classifier(path):
    with open(path, 'rb') as f:
        head = f.read(len(MAGIC))
    if head == MAGIC:
        return _load_binary(path)
    return _load_text(path)


def _load_binary(path):
    with open(path, 'rb') as f:
        data = f.read()
    off = len(MAGIC)
    hsize = struct.calcsize('<IIIdd')
    if len(data) < off + hsize:
        raise err.ParseError(path, "header", "truncated")
    version, dim, n, gamma, bias = struct.unpack_from('<IIIdd', data, off)
    if version > VERSION:
        raise err.SchemaVersionError(path, version, VERSION)
    off += hsize
    if len(data) != off + n * 8 * (dim + 1):
        raise err.ParseError(path, "header", "size does not match {} vectors of dimension {}".format(n, dim))
    rec = np.frombuffer(data, dtype='<f8', offset=off).reshape(n, dim + 1).astype(np.float64)
    return Classifier(gamma, rec[:, 1:].reshape(n, dim), rec[:, 0], bias)


def _load_text(path):
    with open(path, 'r') as f:
        lines = [l.strip() for l in f]
    if len(lines) < 5 or not lines[0].startswith("sigvar-classifier version="):
        raise err.ParseError(path, "line 1", "not a sigvar classifier")
    try:
        version = int(lines[0].split('=', 1)[1])
        if version > VERSION:
            raise err.SchemaVersionError(path, version, VERSION)
        head = dict(l.split('=', 1) for l in lines[1:5])
        gamma, bias = float(head['gamma']), float(head['bias'])
        dim, n = int(head['dim']), int(head['count'])
    except (KeyError, ValueError) as e:
        raise err.ParseError(path, "header", "bad header: {}".format(e))
    rows = [l for l in lines[5:] if l]
    if len(rows) != n:
        raise err.ParseError(path, "line {}".format(6 + len(rows)), "expected {} vectors, got {}".format(n, len(rows)))
    rec = np.empty((n, dim + 1))
    for k, l in enumerate(rows):
        vals = l.split(',')
        if len(vals) != dim + 1:
            raise err.ParseError(path, "line {}".format(6 + k), "expected {} values, got {}".format(dim + 1, len(vals)))
        try:
            rec[k] = [float(v) for v in vals]
        except ValueError as e:
            raise err.ParseError(path, "line {}".format(6 + k), str(e))
    return Classifier(gamma, rec[:, 1:].reshape(n, dim), rec[:, 0], bias)
