"""Full counting statistics of boson transport through a Dicke medium."""

from .eom import *  # noqa: F401,F403
from .fcs import *  # noqa: F401,F403
from .harness import SweepSpec, Table, parse_grid, read_config, reproduce_figure, run_sweep
from .liouvillian import *  # noqa: F401,F403
from .model import *  # noqa: F401,F403

from . import eom, fcs, harness, liouvillian, model

__version__ = "0.1.0"
