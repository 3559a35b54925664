"""Scalar and matrix Wright functions.

Run: python demos/wright_functions.py
"""

import math

import numpy as np

from fracwright import WrightParams, matrix_wright, mittag_leffler, wright_phi
from fracwright.matfun import JordanForm, matrix_wright_jordan
from fracwright.wright import UNBOUNDED_SERIES

# phi(-1/2, 1/2; -x) is the M-Wright density exp(-x**2/4)/sqrt(pi)
p = WrightParams(-0.5, 0.5)
for x in (0.5, 1.0, 4.0, 20.0):
    print(f"phi(-1/2, 1/2; {-x:6.1f}) = {wright_phi(p, -x):.15e}   closed form {math.exp(-x * x / 4) / math.sqrt(math.pi):.15e}")

# the kernel family decays like exp(-sigma x**(1/(1-beta))); the series would
# lose every digit at x = 20, the contour route keeps relative accuracy
beta = 0.7
x = np.array([1.0, 5.0, 10.0, 20.0])
print("\nphi(-0.7, 1; -x):", wright_phi(WrightParams(-beta, 1.0), -x))

# positive arguments with rho in (-1, 0) use a second contour
print("phi(-0.9, 0.3; 5) =", wright_phi(WrightParams(-0.9, 0.3), 5.0))

# Mittag-Leffler: E_{1/2,1/2}(1) = 1/sqrt(pi) + e (1 + erf 1)
print("\nE_{1/2,1/2}(1) =", mittag_leffler(0.5, 0.5, 1.0), " closed form", 1 / math.sqrt(math.pi) + math.e * (1 + math.erf(1.0)))

# matrix argument: the direct route against assembly from a Jordan form;
# beyond |z| rho(A) = 50 the public default refuses, the unbounded
# configuration switches to the Schur-Parlett route instead
jf = JordanForm.from_blocks([(0.8, 2), (2.0, 1)], np.array([[1.0, 0.2, 0.0], [0.1, 1.0, 0.3], [0.0, 0.4, 1.0]]))
A = jf.matrix()
q = WrightParams(-0.3, 0.4)
for z in (-0.5, -4.0, -30.0):
    direct = matrix_wright(q, A, z, UNBOUNDED_SERIES)
    assembled = matrix_wright_jordan(q, jf, z, UNBOUNDED_SERIES)
    print(f"z = {z:6.1f}: |phi(A z)| = {np.max(np.abs(direct)):.3e}, direct vs Jordan {np.max(np.abs(direct - assembled)):.1e}")
