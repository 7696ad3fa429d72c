import os.path as osp
import json
import hashlib

from ruamel import yaml
from ruamel.yaml.comments import CommentedMap, CommentedSeq

from . import util
from . import err

if yaml.version_info < (0, 15):
    raise Exception("sigvar requires ruamel.yaml>=0.15.0")


SHARE_DIR = osp.abspath(osp.dirname(__file__))
CONF_DIR = osp.join(SHARE_DIR, 'conf')
PARAMS_DIR = osp.join(CONF_DIR, 'params')
DOC_DIR = osp.join(SHARE_DIR, 'doc')
USER_DIR = osp.expanduser("~/.sigvar/")

DEFAULT_FILE = osp.join(CONF_DIR, 'sigvar.yml')
USER_FILE = osp.join(USER_DIR, 'sigvar.yml')

assert osp.exists(SHARE_DIR), f"sigvar: share dir not found: {SHARE_DIR}"
assert osp.exists(CONF_DIR), f"sigvar: conf dir not found: {CONF_DIR}"
assert osp.exists(DOC_DIR), f"sigvar: doc dir not found: {DOC_DIR}"


def shipped_params(name):
    """path to one of the parameter files shipped with sigvar:
    pi_def, pi_dup or pi_gauss"""
    return osp.join(PARAMS_DIR, name + '.json')


def plain(node):
    """nested plain dicts and lists, eg of a loaded yml or json tree"""
    if isinstance(node, dict):
        return {str(k): plain(v) for k, v in node.items()}
    if isinstance(node, (list, tuple)):
        return [plain(v) for v in node]
    return node


# -----------------------------------------------------------------------------
# -----------------------------------------------------------------------------
# -----------------------------------------------------------------------------
class Configs:

    @staticmethod
    def load_seq(file_seq, must_exist=()):
        """load and merge a sequence of files, later files winning. Files
        which do not exist are skipped, unless they are in must_exist."""
        curr = Configs()
        for fn in file_seq:
            if not osp.exists(fn):
                if fn in must_exist:
                    raise err.ConfigFileNotFound(fn)
                continue
            tmp = Configs()
            tmp.load(fn)
            curr.merge_from(tmp)
        return curr

    @staticmethod
    def default(extra_files=(), use_default=True):
        seq = [DEFAULT_FILE, USER_FILE] if use_default else []
        seq += list(extra_files)
        return Configs.load_seq(seq, must_exist=tuple(extra_files))

    def __init__(self):
        self._dump = CommentedMap()

    def load(self, file=None, text=None):
        """file or text. YAML files are read as such; anything else is
        read as flat key=value lines with dotted keys"""
        if file == text:
            raise Exception("either file or text")
        if file:
            with open(file, "r") as f:
                text = f.read()
        if file and not file.endswith(('.yml', '.yaml')):
            self._load_keyvals(text, file)
        else:
            self._load_yml(text, file)

    def _load_yml(self, yml, where=None):
        YAML = yaml.YAML()
        try:
            dump = YAML.load(yml)
        except yaml.YAMLError as e:
            raise err.ParseError(where or "<text>", "?", str(e).replace("\n", " "))
        if dump is None:
            dump = CommentedMap()
        if not isinstance(dump, dict):
            raise err.ParseError(where or "<text>", 1, "expected a mapping at the top level")
        self._dump = dump

    def _load_keyvals(self, txt, where=None):
        self._dump = CommentedMap()
        YAML = yaml.YAML(typ='safe')
        for lineno, line in enumerate(txt.splitlines(), 1):
            line = line.split('#', 1)[0].strip()
            if not line:
                continue
            if '=' not in line:
                raise err.ParseError(where or "<text>", lineno, "expected key=value")
            k, v = (s.strip() for s in line.split('=', 1))
            if v.startswith('[') or v.startswith('{'):
                raise err.ParseError(where or "<text>", lineno, "only scalar values are accepted")
            self.set_val(k, YAML.load(v) if v else "")

    def save(self, filename):
        YAML = yaml.YAML()
        with open(filename, "w") as f:
            YAML.dump(self._dump, f)

    def merge_from(self, other):
        self._dump = util.nested_merge(self._dump, other._dump)

    def get_val(self, name_sub, default=None, where=None):
        if where is None:
            where = self._dump
        curr = where
        for e in name_sub.split('.'):
            if not isinstance(curr, dict) or curr.get(e) is None:
                return default
            curr = curr.get(e)
        return curr

    def set_val(self, name_sub, value):
        spl = name_sub.split(".")
        curr = self._dump
        for c in spl[:-1]:
            ch = curr.get(c)
            if not isinstance(ch, dict):
                curr[c] = CommentedMap()
            curr = curr[c]
        if isinstance(value, dict):
            value = CommentedMap(value)
        elif isinstance(value, (list, tuple)):
            value = CommentedSeq(value)
        curr[spl[-1]] = value

    def as_dict(self):
        return plain(self._dump)

    def fingerprint(self):
        """a short hash identifying this configuration"""
        txt = json.dumps(self.as_dict(), sort_keys=True)
        return hashlib.sha256(txt.encode('utf-8')).hexdigest()[:16]

    # -------------------------------------------------------------------------
    def dataset(self, name):
        """settings of a named dataset, falling back on the synthetic one"""
        ds = self.get_val('datasets.' + name)
        if ds is None:
            util.logdbg("no settings for dataset '{}': using 'synthetic'".format(name))
            ds = self.get_val('datasets.synthetic', {})
        return plain(ds)
