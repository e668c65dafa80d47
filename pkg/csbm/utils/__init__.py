from .utils import *
from . import logging
from . import data
