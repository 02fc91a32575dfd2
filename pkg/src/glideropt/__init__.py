"""Co-design toolkit for efficient underwater-glider hulls.

Couples a reduced-order deformation-cage geometry, an analytic
hydrodynamics model, a from-scratch neural surrogate for lift/drag,
CMA-ES shape search over the convex hull of base shapes, and a planar
glide-dynamics simulator.
"""

__version__ = "0.1.0"
