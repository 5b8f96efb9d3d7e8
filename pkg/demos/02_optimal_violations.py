"""Optimal witness violations under homodyne and displacement detection.

Reproduces the value tables for the two-measurement witnesses (s3, s4 over
HH / DD / HD / DH) and the three-measurement witnesses (s33_1, s33_2 over
all eight H/D assignments).  With the default restart budget this takes a
few minutes; lower --restarts style knobs live in the library config.
"""

from cvpam import max_witness, scheme, witnesses
from cvpam.optimize import OptimizerConfig

config = OptimizerConfig(restarts=200, seed=2)

print("two-measurement scenarios")
print("scheme      s3        s4")
for kinds in ("HH", "DD", "HD", "DH"):
    v3 = max_witness(witnesses.s3(), scheme(kinds), config).best_value
    v4 = max_witness(witnesses.s4(), scheme(kinds), config).best_value
    print(f"{kinds:6s}  {v3:8.4f}  {v4:8.4f}")

print()
print("three-measurement scenarios")
print("scheme      s33_1     s33_2")
for kinds in ("DDD", "DDH", "DHD", "DHH", "HDD", "HDH", "HHD", "HHH"):
    v1 = max_witness(witnesses.s33_1(), scheme(kinds), config).best_value
    v2 = max_witness(witnesses.s33_2(), scheme(kinds), config).best_value
    marker = "  <- only non-violating setup for s33_2" if kinds == "HHH" else ""
    print(f"{kinds:6s}  {v1:8.4f}  {v2:8.4f}{marker}")
