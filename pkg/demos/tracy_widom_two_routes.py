"""Two independent routes to the Tracy-Widom F2 distribution.

``tw2_cdf`` integrates the Hastings-McLeod solution of Painleve II; the
oracle evaluates the Fredholm determinant of the Airy kernel by Nystrom
quadrature.  The two agree to well below 1e-6.

    python3 demos/tracy_widom_two_routes.py
"""
import numpy as np

from rmtlab.laws import default_solution, tw2_cdf
from rmtlab.oracles import airy_kernel_fredholm_tw2

print(f"{'x':>5} {'Painleve route':>16} {'Fredholm route':>16} {'difference':>11}")
for x in np.arange(-5.0, 3.5, 1.0):
    a, b = tw2_cdf(x), airy_kernel_fredholm_tw2(x, 160)
    print(f"{x:5.1f} {a:16.10f} {b:16.10f} {abs(a - b):11.1e}")

u = default_solution()
print(f"\nHastings-McLeod q(-8) = {u(-8.0):.6f}; left asymptote sqrt(-t/2) = 2")
