import os


class Error(Exception):
    """base of every sigvar error. The exit_code is what the command
    line returns when the error reaches it."""

    exit_code = 1

    def __init__(self, msg, *args, **kwargs):
        msg = msg.format(*args, **kwargs)
        if not msg:
            msg = "unknown error"
        super().__init__("ERROR: {}".format(msg))

    def __reduce__(self):
        # subclasses take varied constructor arguments: rebuild from the
        # formatted message, so errors cross process boundaries
        return (_rebuild, (type(self), self.args[0]), self.__dict__)


def _rebuild(cls, msg):
    e = Exception.__new__(cls)
    Exception.__init__(e, msg)
    return e


# -----------------------------------------------------------------------------
class ConfigError(Error):
    exit_code = 2


class DataError(Error):
    exit_code = 3


class NumericalError(Error):
    exit_code = 4


# -----------------------------------------------------------------------------
class InvalidArgument(ConfigError):
    def __init__(self, what, value, msg=None):
        msg = "" if msg is None else ": {}".format(msg)
        super().__init__("invalid {}: {}{}", what, value, msg)


class ConfigFileNotFound(ConfigError):
    def __init__(self, path):
        super().__init__("config file not found: '{}' (curr dir is '{}')", path, os.getcwd())


class SchemaVersionError(ConfigError):
    def __init__(self, path, found, supported):
        super().__init__("{}: schema version {} is not supported (this sigvar reads up to version {})",
                         path, found, supported)


class SubcommandNotFound(ConfigError):
    def __init__(self, cmds, args):
        super().__init__("could not find subcommand {} in args {}", cmds, args)


class InvalidParameterVector(ConfigError):
    def __init__(self, kind, values, msg):
        super().__init__("invalid {} parameter vector {}: {}", kind, values, msg)


# -----------------------------------------------------------------------------
class DimensionMismatch(DataError):
    def __init__(self, expected, got, what="vector"):
        super().__init__("{} dimension mismatch: expected {}, got {}", what, expected, got)


class EmptyCluster(DataError):
    def __init__(self, label=None):
        label = "" if label is None else " '{}'".format(label)
        super().__init__("cluster{} has no members", label)


class NotEnoughClusters(DataError):
    def __init__(self, got, needed=2):
        super().__init__("need at least {} non-empty clusters, got {}", needed, got)


class ParseError(DataError):
    def __init__(self, path, location, msg):
        super().__init__("{}:{}: {}", path, location, msg)


class UnreadableFile(DataError):
    def __init__(self, path, reason):
        super().__init__("{}: cannot read: {}", path, reason)


class NonFiniteValue(DataError):
    def __init__(self, path, location):
        super().__init__("{}:{}: non-finite value (NaN or Inf)", path, location)


class ManifestError(DataError):
    def __init__(self, path, msg, *args):
        super().__init__("manifest {}: " + msg, path, *args)


class MissingFile(ManifestError):
    def __init__(self, path, writer, file):
        super().__init__(path, "writer {}: file not found: '{}'", writer, file)


class CountMismatch(ManifestError):
    def __init__(self, path, writer, kind, declared, listed):
        super().__init__(path, "writer {}: declared {} {} samples but {} are listed",
                         writer, declared, kind, listed)


class DuplicateId(ManifestError):
    def __init__(self, path, writer):
        super().__init__(path, "duplicate writer id: {}", writer)


class InsufficientSamples(DataError):
    def __init__(self, writer, what, needed, got):
        super().__init__("writer {}: need {} {}, only {} available", writer, needed, what, got)


class EmptySignature(DataError):
    def __init__(self, what="image"):
        super().__init__("{}: no foreground left after segmentation", what)


class ImageSizeError(DataError):
    def __init__(self, expected, got):
        super().__init__("bad image size: expected {}, got {}", expected, got)


class PolarityError(DataError):
    def __init__(self, expected, got):
        super().__init__("bad image polarity: expected {}, got {}", expected, got)


class AdapterFailed(DataError):
    def __init__(self, cmd, status, diagnostic):
        diagnostic = diagnostic.strip().replace("\n", " | ")
        super().__init__("external duplicator failed (exit status {}): {}: {}", status, cmd, diagnostic)


# -----------------------------------------------------------------------------
class NonFiniteFitness(NumericalError):
    def __init__(self, iteration, particle, value):
        super().__init__("non-finite fitness {} at iteration {}, particle {}", value, iteration, particle)


class SvmNotConverged(NumericalError):
    def __init__(self, iterations, violation, tol):
        super().__init__("SVM did not converge within {} iterations: KKT violation {:.3g} > {}",
                         iterations, violation, tol)
