"""Calculus on the periodic torus fiber.

Builds flat and curved-metric tori, differentiates trigonometric fields,
and checks the structural identities the rest of the workbench leans on:
second-order convergence, discrete self-adjointness of the Laplacian, and
the vanishing integral of a divergence on a closed fiber.
"""

import numpy as np

from twistbench import FiberGrid

print("== flat unit torus, refinement of the gradient ==")
for m in (32, 64, 128):
    grid = FiberGrid(1, (1.0,), (m,))
    x = grid.coords[0]
    phi = np.sin(2 * np.pi * x)
    exact = 2 * np.pi * np.cos(2 * np.pi * x)
    defect = np.max(np.abs(grid.gradient(phi)[..., 0] - exact))
    print(f"  m={m:4d}  sup|grad phi - exact| = {defect:.3e}")

print("\n== curved diagonal metric G = 1 + 0.2 cos(2 pi x) ==")
def G0(*coords):
    return 1.0 + 0.2 * np.cos(2 * np.pi * coords[0])

for m in (32, 64, 128):
    grid = FiberGrid(1, (1.0,), (m,), metric_coeffs=[G0])
    x = grid.coords[0]
    k = 2 * np.pi
    phi = np.sin(k * x)
    G = G0(x)
    Gp = -0.2 * k * np.sin(k * x)
    exact = -k * k * phi / G - Gp * k * np.cos(k * x) / (2 * G * G)
    defect = np.max(np.abs(grid.laplacian(phi) - exact))
    print(f"  m={m:4d}  sup|lap phi - exact| = {defect:.3e}")

print("\n== structural identities on a curved 2-torus (m = 48) ==")
grid = FiberGrid(2, (1.0, 1.0), (48, 48), metric_coeffs=[G0, None])
rng = np.random.default_rng(1)
x, y = grid.coords
phi = 0.3 * np.cos(2 * np.pi * x + 0.7) + 0.2 * np.sin(2 * np.pi * y)
psi = 0.4 * np.sin(2 * np.pi * (x - y))

w = grid.weights
adjoint_defect = abs(
    float(np.sum(phi * grid.laplacian(psi) * w))
    - float(np.sum(psi * grid.laplacian(phi) * w))
)
print(f"  self-adjointness defect      {adjoint_defect:.3e}")
print(f"  integral of lap(phi)         {grid.integrate(grid.laplacian(phi)):.3e}")

r = 1.5 + phi
lhs = grid.divergence(r[..., None] * grid.gradient(psi))
rhs = grid.inner(grid.gradient(r), grid.gradient(psi)) + r * grid.laplacian(psi)
print(f"  product-rule defect (O(h^2)) {np.max(np.abs(lhs - rhs)):.3e}")
