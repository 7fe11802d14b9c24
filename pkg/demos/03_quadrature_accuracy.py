"""Compare the two discretizations of the radial integral equation.

The nodal trapezoid rule samples f_n K_n at the grid points. Near the lower
limit t sin(theta) the kernel has an inverse square-root singularity, which
caps that rule at O(h^(1/2)). Product integration integrates the
piecewise-linear interpolant of f_n against the exact kernel instead, and
converges at O(h^2). A product-integration run on a much finer grid serves as
the reference.
"""

import numpy as np

from brokenray import AcquisitionConfig, assemble, forward_apply
from brokenray.forward import radial_grid
from brokenray.system import quadrature_plan

cfg = AcquisitionConfig()
eps = 0.001
profile = lambda r: r * (1 - r) ** 2
n = 3
fine = 800
coarse = (50, 100, 200)

t_ref = radial_grid(fine, cfg.R, eps)
ref_plan = quadrature_plan(cfg, fine, eps, n)
reference = forward_apply(assemble(n, cfg, fine, eps, "product", ref_plan), profile(t_ref))

for scheme in ("trapezoid", "product"):
    errors = []
    for M in coarse:
        t = radial_grid(M, cfg.R, eps)
        step = fine // M
        g = forward_apply(assemble(n, cfg, M, eps, scheme), profile(t))
        errors.append(np.abs(g - reference[step - 1::step]).max())
    rates = [errors[k] / errors[k + 1] for k in range(len(errors) - 1)]
    print(f"{scheme:9s}  errors " + "  ".join(f"{e:.2e}" for e in errors)
          + "   ratios " + "  ".join(f"{r:.2f}" for r in rates))
print("ratio 4 per halving of h is second order; 1.41 is order one half")
