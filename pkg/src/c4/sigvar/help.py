#!/usr/bin/env python3

import os.path as osp
from collections import OrderedDict as odict

from . import conf


class Topic:
    """a help topic, read from doc/<id>.txt when first shown"""

    def __init__(self, id, title):
        self.id = id
        self.title = title
        self._txt = None

    @property
    def path(self):
        return osp.join(conf.DOC_DIR, self.id + ".txt")

    @property
    def txt(self):
        if self._txt is None:
            with open(self.path) as f:
                self._txt = f.read()
        return self._txt


topics = odict((t.id, t) for t in (
    Topic("quick_tour", "Quick tour"),
    Topic("parameters", "The variability parameters and the shipped parameter files"),
    Topic("protocol", "The evaluation protocol and its reports"),
    Topic("formats", "Manifests, feature stores and other files"),
    Topic("configuration", "Settings, config files and environment variables"),
))


def _table(rows):
    w = max(len(k) for k, _ in rows) + 1
    return '\n'.join('    {:{w}} {}'.format(k, v, w=w) for k, v in rows)


# -----------------------------------------------------------------------------
epilog = """

list of help topics (sigvar help <topic>):
{}

environment:
{}

exit codes:
{}
""".format(
    _table([(k, v.title) for k, v in topics.items()]),
    _table([("SIGVAR_ARGS", "arguments inserted right after the subcommand"),
            ("SIGVAR_SEED", "master seed, overriding --seed")]),
    _table([("0", "success"),
            ("2", "invalid arguments or configuration"),
            ("3", "invalid or insufficient data"),
            ("4", "numerical failure")]),
)
