#!/usr/bin/env python3

import argparse
import pprint
import shlex
import os

from . import util
from . import help
from . import err

from .util import cslist


# -----------------------------------------------------------------------------
def setup(subcommands, module):
    """creates a parser to process sigvar's arguments"""
    p = argparse.ArgumentParser(
        prog='sigvar',
        description='''Optimize writer-variability parameters for signature augmentation, and evaluate them''',
        usage='%(prog)s',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=help.epilog,
    )
    visible_metavar = ",".join(["{},{}".format(cmd.replace("_", "-"), ",".join(aliases)) if aliases else cmd
                                for cmd, aliases in subcommands.items() if is_visible_command(getattr(module, cmd))])
    sp = p.add_subparsers(help='', metavar=visible_metavar)
    add_hidden_args(p)

    for cmd, aliases in subcommands.items():
        cl = getattr(module, cmd)
        cmd_settings = {}
        if is_visible_command(cl):
            cmd_settings['help'] = cl.__doc__
        # subcommands are named with dashes, classes with underscores
        h = sp.add_parser(name=cmd.replace('_', '-'), aliases=aliases, **cmd_settings)
        cl().add_args(h)

        def exec_cmd(args, cmd_class=cl, cmd_name=cmd):
            obj = cmd_class()
            args.command = cmd_name
            sess = obj.session(args)
            return obj._exec(sess, args)
        h.set_defaults(func=exec_cmd)
    return p


def is_visible_command(cls):
    return not (hasattr(cls, "hidden") and cls.hidden is True)


def parse(parser, in_args):
    """parses and performs related tasks"""
    args = parser.parse_args(in_args)
    if not hasattr(args, 'func'):
        argerror(parser, 'missing subcommand')
    if _handle_hidden_args__skip_rest(args):
        return None
    return args


def argerror(parser, *msg_args):
    """report an argument error"""
    print(*msg_args, end='')
    print('\n')
    parser.print_help()
    exit(2)


def merge_envargs(cmds, sysargs):
    """inserts the arguments in SIGVAR_ARGS right after the subcommand"""
    cmdargs = shlex.split(os.environ.get('SIGVAR_ARGS', ''))
    if not cmdargs:
        return sysargs
    pos = find_subcommand(cmds, sysargs)
    cmd = sysargs[pos]
    if cmd in ('help', 'h'):
        return sysargs
    util.logdbg("inserting SIGVAR_ARGS:", cmdargs)
    return sysargs[0:pos + 1] + cmdargs + sysargs[(pos + 1):]


def find_subcommand(cmds, args):
    for i, a in enumerate(args):
        for c, aliases in cmds.items():
            if a in (c, c.replace('_', '-')) or a in aliases:
                return i
    raise err.SubcommandNotFound(list(cmds.keys()), args)


# -----------------------------------------------------------------------------
def add_hidden_args(parser):
    parser.add_argument('--debug-sigvar', action='store_true', help=argparse.SUPPRESS)
    parser.add_argument('--show-args', action='store_true', help=argparse.SUPPRESS)
    parser.add_argument('--only-show-args', action='store_true', help=argparse.SUPPRESS)
    parser.add_argument('--show-args-list', type=cslist, default=[], help=argparse.SUPPRESS)


def _handle_hidden_args__skip_rest(args):
    if args.debug_sigvar:
        util._debug_mode = True
    if util._debug_mode or args.show_args or args.only_show_args:
        pprint.pprint({k: v for k, v in vars(args).items() if k != 'func'}, indent=4)
        if args.only_show_args:
            return True
    for a in args.show_args_list:
        print("args[", a, "]: ", sep='', end='')
        if not hasattr(args, a):
            print("(does not exist!)")
            continue
        pprint.pprint(getattr(args, a), indent=4)
    return False


# -----------------------------------------------------------------------------
def add_basic(parser):
    g = parser.add_argument_group('Run settings')
    g.add_argument("--seed", type=int, default=0,
                   help="""master seed of every random draw (defaults to
                   %(default)s). The SIGVAR_SEED environment variable
                   overrides it.""")
    g.add_argument("-j", "--jobs", type=int, default=util.cpu_count(),
                   help="""use the given number of worker processes
                   (defaults to %(default)s on this machine). Results do
                   not depend on it.""")
    g.add_argument("-q", "--quiet", action="store_true", default=False,
                   help="""only print warnings, errors and results""")
    #
    c = parser.add_argument_group('Configuration files')
    c.add_argument("--config", default=[], action="append",
                   help="""read settings from the given file: yml, or flat
                   key=value lines with dotted keys (eg,
                   swarm.particles=20). Multiple invokations are possible,
                   in which case settings given in latter files prevail
                   over those of earlier files. Run `sigvar help
                   configuration` for the settings.""")
    c.add_argument("--no-default-config", default=False, action="store_true",
                   help="""do not read the default and the user config
                   files""")


def add_manifest(parser, required=True):
    parser.add_argument("-m", "--manifest", required=required,
                        help="""the dataset manifest. Run `sigvar help
                        formats` for its format, and `sigvar manifest` to
                        generate one.""")
    parser.add_argument("-w", "--writers", default="",
                        help="""comma-separated list of writer ids to use.
                        Defaults to every evaluated writer of the
                        manifest.""")


def add_feature_mode(parser):
    parser.add_argument("--feature-mode", choices=('smooth', 'noise'), default=None,
                        help="""feature-space augmentation: smooth filters
                        the vector, noise adds filtered white noise.
                        Defaults to the augment.feature_mode setting.""")


def add_mode(parser):
    parser.add_argument("--mode", required=True, choices=('image', 'feature'),
                        help="""image: the sinusoidal duplicator, in image
                        space; feature: the gaussian filter, in feature
                        space""")


def add_n_per(parser):
    parser.add_argument("--n-per", type=int, default=None,
                        help="""synthetic samples per genuine sample when
                        computing the silhouette (defaults to the
                        optimize.n_per setting)""")
