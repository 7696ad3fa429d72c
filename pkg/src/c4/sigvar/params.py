"""Variability parameter vectors: the particle positions of the swarm and
the contents of the parameter files."""

import enum
import math
from collections import OrderedDict as odict

import numpy as np

from . import err


class Kind(enum.Enum):
    DUPLICATOR = 'duplicator'
    GAUSSIAN = 'gaussian'

    @staticmethod
    def parse(s):
        if isinstance(s, Kind):
            return s
        s = str(s).lower()
        if s in ('image', 'duplicator', 'dup'):
            return Kind.DUPLICATOR
        if s in ('feature', 'gaussian', 'gauss'):
            return Kind.GAUSSIAN
        raise err.InvalidArgument("parameter kind", s, "use duplicator|gaussian")


NAMES = {
    Kind.DUPLICATOR: ('alpha_A_min', 'alpha_A_max',
                      'alpha_P_min', 'alpha_P_max',
                      'alpha_S_min', 'alpha_S_max'),
    Kind.GAUSSIAN: ('sigma_min', 'sigma_max'),
}

# global search box; the low bound of each max-parameter is the
# sampled min-parameter
LOW = {
    Kind.DUPLICATOR: (10., 10., 0., 0., 0., 0.),
    Kind.GAUSSIAN: (0.01, 0.01),
}
HIGH = {
    Kind.DUPLICATOR: (100., 100., 1., 1., 1., 1.),
    Kind.GAUSSIAN: (1., 1.),
}

DEFAULT_VARIABILITY = (5., 30., 0.5, 1., 0., 1.)

# the duplicator parameters which are not optimized; sigvar carries them
# to the external duplicator untouched
PASSTHROUGH_DEFAULTS = odict([
    ('xi_x1', -0.5), ('sigma_x1', 20.), ('mu_x1', 40.),
    ('xi_x2', -0.5), ('sigma_x2', 28.), ('mu_x2', 56.),
    ('xi_x3', -0.5), ('sigma_x3', 36.), ('mu_x3', 72.),
    ('xi_y1', -0.5), ('sigma_y1', 8.), ('mu_y1', 8.),
    ('xi_y2', -0.5), ('sigma_y2', 9.6), ('mu_y2', 9.6),
    ('xi_y3', -0.5), ('sigma_y3', 12.), ('mu_y3', 12.),
    ('k1', 0.33), ('k2', 0.67),
    ('psi', 0.8),
    ('xi_S', -0.19), ('sigma_S', 3.28), ('mu_S', -1.30),
])


def kind_of_names(names):
    names = set(names)
    for kind, kn in NAMES.items():
        if set(kn) <= names:
            return kind
    raise err.InvalidArgument("parameter names", sorted(names),
                              "expected {} or {}".format(NAMES[Kind.DUPLICATOR], NAMES[Kind.GAUSSIAN]))


# -----------------------------------------------------------------------------
class ParameterVector:
    """an immutable, ordered (min, max)-pairs vector of a given kind.

    Construction validates finiteness, the ordering of each pair and the
    lower bounds the samplers divide by.
    Membership of the search box is not required (the default duplicator
    vector lies outside it); use within_bounds() or repaired() for that.
    """

    __slots__ = ('kind', 'values')

    def __init__(self, kind, values):
        kind = Kind.parse(kind)
        values = tuple(float(v) for v in values)
        if len(values) != len(NAMES[kind]):
            raise err.InvalidParameterVector(kind.value, values,
                                             "expected {} values".format(len(NAMES[kind])))
        if not all(math.isfinite(v) for v in values):
            raise err.InvalidParameterVector(kind.value, values, "non-finite value")
        for i in range(0, len(values), 2):
            if values[i] > values[i + 1]:
                raise err.InvalidParameterVector(kind.value, values, "{} > {}".format(
                    NAMES[kind][i], NAMES[kind][i + 1]))
        if kind == Kind.GAUSSIAN and values[0] <= 0.:
            raise err.InvalidParameterVector(kind.value, values, "sigma must be positive")
        if kind == Kind.DUPLICATOR and values[0] <= 0.:
            raise err.InvalidParameterVector(kind.value, values, "alpha_A_min must be positive")
        if kind == Kind.DUPLICATOR and values[2] < 0.:
            raise err.InvalidParameterVector(kind.value, values, "alpha_P_min must not be negative")
        object.__setattr__(self, 'kind', kind)
        object.__setattr__(self, 'values', values)

    def __setattr__(self, name, value):
        raise AttributeError("ParameterVector is immutable")

    @staticmethod
    def repaired(kind, raw):
        """clamp every coordinate into the search box, then swap the
        (min, max) pairs left inverted"""
        kind = Kind.parse(kind)
        v = np.clip(np.asarray(raw, dtype=np.float64), LOW[kind], HIGH[kind])
        for i in range(0, len(v), 2):
            if v[i] > v[i + 1]:
                v[i], v[i + 1] = v[i + 1], v[i]
        return ParameterVector(kind, v)

    @staticmethod
    def mean(vectors):
        """componentwise arithmetic mean"""
        vectors = list(vectors)
        if not vectors:
            raise err.InvalidArgument("parameter vector list", "[]", "cannot average nothing")
        kind = vectors[0].kind
        if any(v.kind != kind for v in vectors):
            raise err.InvalidArgument("parameter vector list", [v.kind.value for v in vectors],
                                      "cannot average vectors of different kinds")
        return ParameterVector(kind, np.mean([v.values for v in vectors], axis=0))

    @staticmethod
    def from_dict(d, kind=None):
        kind = kind_of_names(d.keys()) if kind is None else Kind.parse(kind)
        try:
            return ParameterVector(kind, [d[n] for n in NAMES[kind]])
        except KeyError as e:
            raise err.InvalidArgument("parameter set", dict(d), "missing {}".format(e))
        except (TypeError, ValueError):
            raise err.InvalidArgument("parameter set", dict(d), "values must be real numbers")

    def as_dict(self):
        return odict(zip(NAMES[self.kind], self.values))

    def as_array(self):
        return np.array(self.values, dtype=np.float64)

    @property
    def names(self):
        return NAMES[self.kind]

    def within_bounds(self):
        return all(lo <= v <= hi for v, lo, hi in zip(self.values, LOW[self.kind], HIGH[self.kind]))

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def __getitem__(self, i):
        if isinstance(i, str):
            return self.values[self.names.index(i)]
        return self.values[i]

    def __eq__(self, other):
        return (isinstance(other, ParameterVector)
                and self.kind == other.kind and self.values == other.values)

    def __hash__(self):
        return hash((self.kind, self.values))

    def __repr__(self):
        vals = ", ".join("{}={:.6g}".format(n, v) for n, v in zip(self.names, self.values))
        return "ParameterVector({}: {})".format(self.kind.value, vals)

    def __reduce__(self):
        return (ParameterVector, (self.kind, self.values))
