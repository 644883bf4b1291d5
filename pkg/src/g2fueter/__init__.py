"""Calibrated geometry on G2-manifolds with an associative distribution.

Submodules:
  exterior   sparse exterior algebra over R^n (n <= 8), Hodge star, pullback
  g2core     the model G2 form, metric recovery, cross product, chi/tau,
             lambda^k isometries and 2-form projections
  splitting  graph planes over TM = H + V, vertical-energy hierarchy,
             form decomposition, adiabatic families, calibration scans
  fueter     the Fueter operator, six equivalent characterizations,
             completions, k-vanishing, polar spaces
  models     Lie-algebra catalog, invariant differentials, closedness
             flags, nilmanifold homology
  pde        analytic Fueter solutions (flat, SU(2), Heisenberg), energy
             functionals, minimization experiments, the action functional
  fm_gauge   real Fourier-Mukai transform, curvature, instanton and
             deformation residuals, large-radius sweeps
  cli        the `g2f` command-line driver
"""

from . import exterior, fm_gauge, fueter, g2core, models, pde, splitting

__all__ = ["exterior", "g2core", "splitting", "fueter", "models", "pde", "fm_gauge"]
__version__ = "0.1.0"
