"""Classical and quantum bounds of the witness catalog.

Every witness here is a linear functional of the correlators E_xy with a
classical bound (the best any one-bit classical strategy can do) and a
quantum bound (the best any qubit strategy can do).  The classical side is
an exact enumeration; the quantum side is a multistart optimization over
pure states and general projective measurements.
"""

import math

from cvpam import classical_max, max_witness, scheme, witnesses
from cvpam.optimize import OptimizerConfig

config = OptimizerConfig(restarts=48, seed=1)

print("witness   classical (enumerated)   quantum (optimized)   quantum (closed form)")
for wit in (witnesses.s3(), witnesses.s4(), witnesses.s33_1(), witnesses.s33_2()):
    enumerated = classical_max(wit)
    optimized = max_witness(wit, scheme("P" * wit.n_y), config).best_value
    print(f"{wit.name:8s}  {enumerated:22.6f}   {optimized:19.9f}   {wit.quantum_bound:.9f}")

print()
print("tilted family: classical bound max(2-w, 3w), quantum 2 sqrt(w^2+(1-w)^2) + w")
for w in (0.0, 0.25, 0.5, 0.75, 1.0):
    wit = witnesses.s3_tilted(w)
    optimized = max_witness(wit, scheme("PP"), config).best_value
    print(
        f"  w={w:4.2f}: classical {classical_max(wit):.4f}"
        f"  quantum {optimized:.9f} (closed form {wit.quantum_bound:.9f})"
    )

print()
print(f"s3 quantum maximum 1 + 2 sqrt(2) = {1 + 2 * math.sqrt(2):.9f}")
