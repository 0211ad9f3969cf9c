"""DEA efficiency scoring and GM(1,1) grey forecasting over energy panel data."""

from greydea._core import *  # noqa: F401,F403
from greydea._core import __version__  # noqa: F401
