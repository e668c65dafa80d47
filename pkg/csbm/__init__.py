"""csbm: iterative refinement clustering for contextual and signed block models"""
__version__ = "0.1.0"

from . import utils
from . import linalg
from . import models
from . import metrics
from . import init
from . import refine
from . import experiments
from .refine import ir_cluster
