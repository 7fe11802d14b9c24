"""How the harmonic kernel K_n(t/rho) behaves across its three regimes.

For rho > t only the second segment of the ray reaches radius rho, once.
For t sin(theta) < rho < t both segments cross it, so a second term switches
on and the kernel jumps at t/rho = 1. At the closest approach of the second
segment, t/rho = 1/sin(theta), the arc-length rate blows up like an inverse
square root.
"""

import math

import numpy as np

from brokenray import kernel_K

theta = math.pi / 6
print(f"breaking angle theta = {theta:.4f} rad, singular point t/rho = {1 / math.sin(theta):.3f}\n")

print("t/rho      |K_0|      |K_3|")
for t_hat in (0.0, 0.5, 0.9, 0.999, 1.0, 1.001, 1.5, 1.9, 1.99, 1.999):
    print(f"{t_hat:6.3f}  {abs(kernel_K(t_hat, 0, theta)):9.4f}  {abs(kernel_K(t_hat, 3, theta)):9.4f}")

jump = abs(kernel_K(1 + 1e-9, 0, theta) - kernel_K(1 - 1e-9, 0, theta))
print(f"\njump of K_0 at t/rho = 1: {jump:.6f}   1/cos(theta) - 1 = {1 / math.cos(theta) - 1:.6f}")

# the blow-up is integrable: |K| * sqrt(distance to the singular point) levels off
s = math.sin(theta)
for gap in (1e-2, 1e-4, 1e-6):
    t_hat = (1 - gap) / s
    print(f"gap {gap:.0e}: |K_0| * sqrt(gap) = {abs(kernel_K(t_hat, 0, theta)) * math.sqrt(gap):.4f}")

# negative orders are the complex conjugates
print("\nK_{-2}(1.3) == conj(K_2(1.3)):",
      np.isclose(kernel_K(1.3, -2, theta), np.conj(kernel_K(1.3, 2, theta))))
