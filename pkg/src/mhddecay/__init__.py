"""Spectral decay diagnostics for the compressible MHD perturbation system.

The package couples three layers:

* a pseudo-spectral representation of perturbation fields on a periodic box
  and the nonlinear evolution of the density/velocity/magnetic triple,
* an exact per-frequency linear propagator plus a continuum-frequency
  quadrature oracle that measures whole-space decay exponents of the
  linearized semigroup,
* dyadic (Littlewood-Paley) analysis tools: Besov norms, paraproduct
  decompositions, and randomized ratio harnesses for the product,
  commutator, composition, and interpolation inequalities the decay
  argument relies on.
"""

__version__ = "0.1.0"
