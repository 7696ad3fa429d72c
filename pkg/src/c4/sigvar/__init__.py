__version__ = "0.1.0"

from .params import Kind as Kind
from .params import ParameterVector as ParameterVector
from .image import SignatureImage as SignatureImage
from .image import Polarity as Polarity
