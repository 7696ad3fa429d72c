#!/usr/bin/env python3
import os
import re
import sys
import copy
import math
import shlex
import hashlib
import datetime
import subprocess
import multiprocessing
from dateutil import tz
from dateutil import parser as dtparser
from dateutil.relativedelta import relativedelta

import dill
import colorama
colorama.init()

from . import err

_debug_mode = False
_quiet_mode = False


def supports_color():
    """
    Returns True if the running system's terminal supports color, and False
    otherwise.
    """
    plat = sys.platform
    supported_platform = plat != 'Pocket PC' and (plat != 'win32' or 'ANSICON' in os.environ)
    is_a_tty = hasattr(sys.stdout, 'isatty') and sys.stdout.isatty()
    if not supported_platform or not is_a_tty:
        return False
    return True


def log(*args, **kwargs):
    print(*args, **kwargs, flush=True)


def color_log(style, *args, **kwargs):
    if supports_color():
        print(style, sep='', end='')
        print(*args, **kwargs)
        print(colorama.Style.RESET_ALL, sep='', end='', flush=True)
    else:
        log(*args, **kwargs)


def logdbg(*args, **kwargs):
    if _debug_mode:
        log(*args, **kwargs)


def loginfo(*args, **kwargs):
    if not _quiet_mode:
        color_log(colorama.Fore.CYAN + colorama.Style.BRIGHT, *args, **kwargs)


def lognotice(*args, **kwargs):
    if not _quiet_mode:
        color_log(colorama.Fore.BLUE + colorama.Style.BRIGHT, *args, **kwargs)


def logdone(*args, **kwargs):
    if not _quiet_mode:
        color_log(colorama.Fore.GREEN + colorama.Style.BRIGHT, *args, **kwargs)


def logwarn(*args, **kwargs):
    color_log(colorama.Fore.YELLOW + colorama.Style.BRIGHT, *args, **kwargs)


# -----------------------------------------------------------------------------
def human_readable_time(seconds):
    if seconds < 60.:
        return '{:.3g}s'.format(seconds)
    elif seconds < 3600.:
        mins = int(seconds / 60.)
        secs = int(seconds - 60. * mins)
        return '{}m {}s'.format(mins, secs)
    else:
        hours = int(seconds / 3600.)
        mins = int((seconds - hours * 3600.) / 60.)
        secs = int(seconds - hours * 3600. - mins * 60.)
        return '{}:{} {}\''.format(hours, mins, secs)


def timestamp():
    """the current local time, ISO formatted with its utc offset"""
    return datetime.datetime.now(tz.tzlocal()).isoformat(timespec='seconds')


def time_since(stamp):
    """return the time elapsed since an ISO timestamp, as a
    dateutil.relativedelta"""
    then = dtparser.isoparse(stamp)
    if then.tzinfo is None:
        then = then.replace(tzinfo=tz.tzlocal())
    return relativedelta(datetime.datetime.now(tz.tzlocal()), then)


def human_readable_delta(rd):
    for unit in ('years', 'months', 'days', 'hours', 'minutes'):
        v = getattr(rd, unit)
        if v:
            return '{} {}'.format(v, unit if v != 1 else unit[:-1])
    return 'just now'


# -----------------------------------------------------------------------------
def splitesc(string, split_char, escape_char=r'\\'):
    """split a string at the given character, allowing for escaped characters
    http://stackoverflow.com/a/21107911"""
    rx = r'(?<!{}){}'.format(escape_char, split_char)
    s = re.split(rx, string)
    return s


def cslist(arg):
    """transform comma-separated arguments into a list of strings.
    commas can be escaped with backslash, \\"""
    s = splitesc(arg, ',')
    l = []
    for elm in s:
        elm = re.sub(r'\\,', r',', elm)
        if elm:
            l.append(elm)
    return l


def int_range(arg):
    """parse an integer selection: '1..3' (inclusive), '0,10,22' or a
    mix of both, eg '0..2,10'"""
    out = []
    for part in cslist(arg):
        m = re.fullmatch(r'\s*(-?\d+)\s*\.\.\s*(-?\d+)\s*', part)
        try:
            if m:
                lo, hi = int(m.group(1)), int(m.group(2))
                if hi < lo:
                    raise err.InvalidArgument("range", arg, "upper end is below lower end")
                out.extend(range(lo, hi + 1))
            else:
                out.append(int(part))
        except ValueError:
            raise err.InvalidArgument("integer range", arg)
    if not out:
        raise err.InvalidArgument("integer range", arg, "empty")
    return out


def float_grid(arg):
    """parse a real grid 'start:stop:step' (stop included when it
    falls on the grid) or a comma-separated list of reals"""
    try:
        if ':' in arg:
            start, stop, step = (float(x) for x in arg.split(':'))
            if step <= 0 or stop < start:
                raise err.InvalidArgument("grid", arg, "need start <= stop and step > 0")
            n = int(math.floor((stop - start) / step + 1e-9)) + 1
            return [round(start + i * step, 12) for i in range(n)]
        return [float(x) for x in cslist(arg)]
    except ValueError:
        raise err.InvalidArgument("grid", arg)


def nested_merge(into_dct, from_dct, into_dct_is_const=True):
    """merge from_dct into a copy of into_dct, recursing into dicts"""
    out = copy.deepcopy(into_dct) if into_dct_is_const else into_dct
    for k, v in from_dct.items():
        if (k in out and isinstance(out[k], dict) and isinstance(v, dict)):
            nested_merge(out[k], v, False)
        else:
            out[k] = v
    return out


# -----------------------------------------------------------------------------
def derive_seed(master, *keys):
    """derive a 64-bit child seed from a master seed and a key path. The
    result depends only on the arguments, never on scheduling order."""
    txt = ":".join(str(k) for k in (master,) + keys)
    digest = hashlib.sha256(txt.encode('utf-8')).digest()
    return int.from_bytes(digest[:8], 'little')


def cpu_count():
    return multiprocessing.cpu_count()


def _dill_call(payload):
    fn, item = dill.loads(payload)
    return fn(item)


def parallel_map(fn, items, jobs=1):
    """map fn over items in up to jobs worker processes, returning the
    results in item order. fn may be a closure: it is shipped to the
    workers with dill."""
    items = list(items)
    if jobs is None or jobs <= 1 or len(items) <= 1:
        return [fn(i) for i in items]
    payloads = [dill.dumps((fn, i)) for i in items]
    nproc = min(jobs, len(items))
    logdbg("parallel_map: {} jobs over {} processes".format(len(items), nproc))
    with multiprocessing.get_context().Pool(nproc) as pool:
        return pool.map(_dill_call, payloads, chunksize=1)


# -----------------------------------------------------------------------------
def runcmd(cmd, *cmd_args, **run_args):
    """run a command, capturing its output. Does not raise on failure:
    check the returned CompletedProcess."""
    if isinstance(cmd, str):
        cmd = shlex.split(cmd)
    else:
        cmd = list(cmd)
    cmd += [str(a) for a in cmd_args]
    logdbg("running command: {}".format(shlex.join(cmd)))
    run_args.setdefault('capture_output', True)
    run_args.setdefault('text', True)
    sp = subprocess.run(cmd, **run_args)
    logdbg("finished running command: exit status", sp.returncode)
    return sp
