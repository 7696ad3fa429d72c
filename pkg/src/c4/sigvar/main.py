#!/usr/bin/env python3

import sys
import argcomplete

from collections import OrderedDict as odict

from c4.sigvar.session import Session
from c4.sigvar import session as c4session
from c4.sigvar import args as c4args
from c4.sigvar import help as c4help
from c4.sigvar import err


cmds = odict([
    ('help', ['h']),
    ('optimize', ['o']),
    ('augment', ['a']),
    ('sweep_sigma', ['ss']),
    ('evaluate', ['e']),
    ('validate_features', ['vf']),
    ('manifest', ['m']),
    ('synthesize', ['syn']),
    ('replay', []),
])


def cmd_abbrevs():
    for k, v in cmds.items():
        k = k.replace('_', '-')
        if v:
            yield (f"{k}, " + ', '.join(v))
        else:
            yield k


def sigvar_main(in_args=None):
    if in_args is None:
        in_args = sys.argv[1:]
    try:
        in_args = c4args.merge_envargs(cmds, in_args)
        mymod = sys.modules[__name__]
        parser = c4args.setup(cmds, mymod)
        # to enable autocomplete:
        # eval "$(register-python-argcomplete sigvar)"
        argcomplete.autocomplete(parser)
        args = c4args.parse(parser, in_args)
        if args:
            args.func(args)
        return 0
    except err.Error as e:
        print(e, file=sys.stderr)
        return e.exit_code


# -----------------------------------------------------------------------------
class cmdbase:
    """base class for commands"""
    def add_args(self, parser):
        """add arguments to a command parser"""
        pass
    def session(self, args):
        """create a session given the arguments"""
        return None
    def _exec(self, sess, args):
        assert False, 'never call the base class method. Implement this in derived classes'


class help(cmdbase):
    """get help on a particular subcommand or topic"""
    def add_args(self, parser):
        parser.add_argument('subcommand_or_topic', default="", nargs='?')
    def _exec(self, sess, args):
        sct = args.subcommand_or_topic.lower().replace('-', '_')
        if not sct:
            sigvar_main(['-h'])
            return
        if sct in cmds:
            self._show(sct)
            return
        for c, aliases in cmds.items():
            if sct in aliases:
                self._show(c)
                return
        subtopic = c4help.topics.get(sct)
        if subtopic is not None:
            print(subtopic.txt)
            return
        _ind = '    '
        _indnl = '\n' + _ind
        _cmds = _ind + _indnl.join(cmd_abbrevs())
        _topics = _ind + _indnl.join(c4help.topics.keys())
        raise err.InvalidArgument("help", args.subcommand_or_topic,
                                  "not a subcommand or topic.\n" +
                                  f"\nAvailable subcommands are:\n{_cmds}\n" +
                                  f"\nAvailable help topics are:\n{_topics}\n")
    def _show(self, subcommand):
        import textwrap
        import re
        mymod = sys.modules[__name__]
        cls = getattr(mymod, subcommand)
        name = subcommand.replace('_', '-')
        sctxt = "/".join([name] + cmds[subcommand])
        block = re.sub("\n", " ", cls.__doc__)
        block = re.sub(r"\ +", " ", block)
        block = textwrap.fill(block, 60)
        sep = "--" * 20 + "\n"
        print(f"{sep}sigvar {sctxt}\n{sep}\n{block}\n")
        sigvar_main([name, '-h'])


# -----------------------------------------------------------------------------
class sesscmd(cmdbase):
    """a command which runs in a session"""
    def session(self, args):
        return Session(**vars(args))
    def add_args(self, parser):
        c4args.add_basic(parser)


class optimize(sesscmd):
    """optimize the variability parameters of every writer with a particle
    swarm, and write the per-writer and the averaged parameter vectors"""
    def add_args(self, parser):
        super().add_args(parser)
        c4args.add_mode(parser)
        c4args.add_manifest(parser)
        parser.add_argument("-i", "--iterations", type=int, default=None,
                            help="""swarm iterations (defaults to the
                            swarm.iterations setting)""")
        parser.add_argument("-p", "--particles", type=int, default=None,
                            help="""swarm size (defaults to the
                            swarm.particles setting)""")
        parser.add_argument("--on-error", choices=('skip', 'abort'), default=None,
                            help="""what to do with writers which cannot be
                            optimized (defaults to the optimize.on_error
                            setting)""")
        c4args.add_n_per(parser)
        c4args.add_feature_mode(parser)
        parser.add_argument("-o", "--out", default="params.json",
                            help="""the parameter file to write (defaults
                            to %(default)s)""")
    def _exec(self, sess, args):
        sess.optimize()


class augment(sesscmd):
    """generate synthetic samples: duplicates of signature images, or
    filtered copies of the vectors of a feature store"""
    def add_args(self, parser):
        super().add_args(parser)
        c4args.add_mode(parser)
        parser.add_argument("--params", required=True,
                            help="""a parameter file, or the name of a
                            shipped one (pi_def, pi_dup, pi_gauss)""")
        parser.add_argument("--in", dest="input", required=True,
                            help="""image mode: a signature image or a
                            directory of them; feature mode: a feature
                            store""")
        parser.add_argument("-n", "--count", type=int, default=1,
                            help="""synthetic samples per input sample""")
        c4args.add_feature_mode(parser)
        parser.add_argument("-o", "--out", required=True,
                            help="""image mode: the output directory;
                            feature mode: the feature store to write""")
    def _exec(self, sess, args):
        sess.augment()


class sweep_sigma(sesscmd):
    """compute the absolute silhouette of every writer over a grid of fixed
    gaussian filter sigmas"""
    def add_args(self, parser):
        super().add_args(parser)
        c4args.add_manifest(parser)
        parser.add_argument("--sigma-grid", default="0.1:4.0:0.1",
                            help="""start:stop:step (stop included) or a
                            comma-separated list. Defaults to
                            %(default)s.""")
        c4args.add_n_per(parser)
        c4args.add_feature_mode(parser)
        parser.add_argument("-o", "--out", default="curve.csv",
                            help="""the csv to write: writer,sigma,abs_silhouette""")
    def _exec(self, sess, args):
        sess.sweep_sigma()


class evaluate(sesscmd):
    """run the evaluation protocol: writer-dependent classifiers trained
    with r genuine signatures and d synthetic samples per real one,
    reporting the equal error rate over repetitions"""
    def add_args(self, parser):
        super().add_args(parser)
        c4args.add_manifest(parser)
        parser.add_argument("--params", default=None,
                            help="""the augmentation parameters: a parameter
                            file or the name of a shipped one. Omit for the
                            baseline, without augmentation.""")
        parser.add_argument("--r", default="1",
                            help="""genuine training signatures per writer,
                            eg 1..3 or 1,5,12""")
        parser.add_argument("--d", default="0",
                            help="""synthetic samples per real one, eg 0..22
                            or 0,5,10""")
        parser.add_argument("--reps", type=int, default=None,
                            help="""repetitions (defaults to the
                            evaluate.reps setting)""")
        parser.add_argument("--gamma", type=float, default=None,
                            help="""the RBF kernel gamma. Defaults to the
                            verify.gamma setting, or 1/(D * mean feature
                            variance) of the training samples.""")
        parser.add_argument("--select-gamma", default=None, metavar="GRID",
                            help="""pick gamma among these candidates on a
                            validation split first""")
        parser.add_argument("--threshold", choices=('global', 'writer'), default=None,
                            help="""headline EER with one threshold for all
                            writers, or the mean of per-writer EERs""")
        parser.add_argument("--no-augment-negatives", action="store_true", default=False,
                            help="""do not generate synthetic random
                            forgeries""")
        parser.add_argument("--no-chart", action="store_true", default=False,
                            help="""do not write the svg chart""")
        c4args.add_feature_mode(parser)
        parser.add_argument("-o", "--out", default="report",
                            help="""the report directory""")
    def _exec(self, sess, args):
        sess.evaluate()


class validate_features(sesscmd):
    """compare parameter vectors by the absolute silhouette between the
    genuine and the synthetic features of every writer"""
    def add_args(self, parser):
        super().add_args(parser)
        c4args.add_manifest(parser)
        parser.add_argument("--params-a", default=None, help="""a parameter file or shipped name""")
        parser.add_argument("--params-b", default=None, help="""a parameter file or shipped name""")
        parser.add_argument("--params", default=[], action="append",
                            help="""more parameter files to compare""")
        c4args.add_n_per(parser)
        c4args.add_feature_mode(parser)
        parser.add_argument("-o", "--out", default=None,
                            help="""also write the table to this csv""")
    def _exec(self, sess, args):
        sess.validate_features()


class manifest(sesscmd):
    """generate a manifest from a directory of signature images"""
    def add_args(self, parser):
        super().add_args(parser)
        parser.add_argument("root", help="""the dataset directory""")
        parser.add_argument("--dataset", default="auto",
                            choices=('auto', 'generic', 'gpds', 'cedar', 'mcyt'),
                            help="""the file naming convention. Run `sigvar
                            help formats` for them.""")
        parser.add_argument("--name", default=None, help="""the dataset name""")
        parser.add_argument("--canvas", default=None, metavar="H,W",
                            help="""the canvas size. Defaults to the one of the
                            dataset settings.""")
        parser.add_argument("--development", default="",
                            help="""comma-separated writer ids serving only
                            as random forgeries""")
        parser.add_argument("-o", "--out", default=None,
                            help="""the manifest to write (defaults to
                            ROOT/manifest.json)""")
    def _exec(self, sess, args):
        sess.manifest()


class synthesize(sesscmd):
    """write a synthetic dataset and its manifest"""
    def add_args(self, parser):
        super().add_args(parser)
        parser.add_argument("outdir", help="""the directory to write""")
        parser.add_argument("--writers", type=int, default=20)
        parser.add_argument("--genuine", type=int, default=None,
                            help="""genuine signatures per writer""")
        parser.add_argument("--skilled", type=int, default=None,
                            help="""skilled forgeries per writer""")
        parser.add_argument("--development", type=int, default=0,
                            help="""number of writers serving only as
                            random forgeries""")
        parser.add_argument("--vectors", action="store_true", default=False,
                            help="""write writers of feature vectors instead
                            of images""")
        parser.add_argument("--dim", type=int, default=32,
                            help="""dimension of the feature vectors""")
    def _exec(self, sess, args):
        sess.synthesize()


class replay(cmdbase):
    """re-run a recorded run with its recorded configuration and seed"""
    def add_args(self, parser):
        parser.add_argument("run", help="""the run record (run.json)""")
        parser.add_argument("-o", "--out", default=None,
                            help="""write the outputs here instead""")
        parser.add_argument("-j", "--jobs", type=int, default=None,
                            help="""override the recorded number of jobs""")
    def _exec(self, sess, args):
        c4session.replay(args.run, args.out, args.jobs)


if __name__ == "__main__":
    sys.exit(sigvar_main(sys.argv[1:]))
