from __future__ import absolute_import

__version__ = '0.1.0'

from .behavior import Behavior, induced_behavior, simulate_rounds  # noqa
from .bell import check_inequality, expected_F, quantum_behavior  # noqa
from .checks import register_check  # noqa
from .compiler import Compiler, serialize  # noqa
from .parser import Parser, deserialize  # noqa
from .utils import process  # noqa
