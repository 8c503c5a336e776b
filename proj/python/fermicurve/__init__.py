"""Phase-plane curves of 1D bound states.

Forward map (wavefunction -> curve -> area), quantization rules, inverse
construction (curve -> potential -> wavefunction), and Wigner cross-checks.
Thin wrapper over the C++ core; see the individual docstrings.
"""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
