"""Exact computation with hyperplane multiarrangements.

Subpackages:

- :mod:`multiarr.scalars`      exact cyclotomic field arithmetic
- :mod:`multiarr.linalg`       exact Gaussian elimination helpers
- :mod:`multiarr.arrangement`  arrangements, lattices, multiplicities
- :mod:`multiarr.rank2`        rank-2 exponents and Euler multiplicities
- :mod:`multiarr.induction`    inductive-freeness search and refutation
- :mod:`multiarr.catalog`      built-in arrangement families and fixtures
- :mod:`multiarr.verification` the bundled acceptance checks
- :mod:`multiarr.cli`          command line interface
"""

from __future__ import annotations

__version__ = "0.1.0"
