"""Multi-parameter singular perturbation toolkit for the Robertson reaction.

Subpackages by task:

- :mod:`robertson.model` -- full kinetics and the planar reduced system
- :mod:`robertson.stiff_solver` -- L-stable implicit integrator with events
- :mod:`robertson.param_geometry` -- parameter-plane regimes and blow-up charts
- :mod:`robertson.blowup_charts` -- phase-space blow-ups and desingularized fields
- :mod:`robertson.singular_orbits` -- regime-wise singular-limit orbits
- :mod:`robertson.analysis` -- Hausdorff comparison, convergence studies, sweeps
- :mod:`robertson.cli` -- command-line entry point
"""

from __future__ import annotations

__version__ = "0.1.0"

__all__ = ["__version__"]
