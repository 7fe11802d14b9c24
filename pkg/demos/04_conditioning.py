"""Why truncation is needed: every harmonic system is badly conditioned.

We factor A_n for all n on the default grid and print the full condition
number, the condition number after keeping half of the singular values, and
the discarded spectral norm sigma_{r+1}.
"""

import numpy as np

from brokenray import AcquisitionConfig, assemble, truncated_svd
from brokenray.cli import condition_table

cfg = AcquisitionConfig()
M = N = 150
ops = [truncated_svd(assemble(n, cfg, M), M // 2) for n in range(N // 2 + 1)]
rows = condition_table(ops)

print("   n   kappa_full   kappa_half   sigma_r+1")
for n, full, trunc, tail in rows[::8]:
    print(f"{n:4d}   {full:10.3e}   {trunc:10.3e}   {tail:9.3e}")
full = np.array([r[1] for r in rows])
print(f"\n{np.mean(full > 1e6):.0%} of the {len(rows)} harmonics have condition number above 1e6")

A = assemble(5, cfg, M)
op = truncated_svd(A, M // 2)
gap = np.linalg.norm(A.entries - op.low_rank(), 2)
print(f"n=5: ||A - A_r||_2 = {gap:.6e}, sigma_r+1 = {op.truncation_error:.6e}")
