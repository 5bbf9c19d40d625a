"""Constraint counts next to the comparison tables, then a real R1CS with its witness."""

from arion.constraints import build_r1cs, count_r1cs, count_report, generate_witness, is_satisfied, output_values
from arion import arion_hash, profile

for h, n, d in [("arion", 3, 5), ("arion", 4, 5), ("poseidon", 3, 5), ("griffin", 3, 5)]:
    print(f"r1cs {h:9s} n={n} d={d}: {count_r1cs(h, n, d)}")

report = count_report()
print(f"{len(report.rows)} table cells recomputed, {len(report.flags())} deviate:")
for flag in report.flags():
    print("  ", flag)

params = profile("bn254_n3_d1-5_d2-257")
cs = build_r1cs(params)
w = generate_witness(cs, [7, 8], params)
print(f"built {len(cs)} constraints over {cs.num_vars} variables, satisfied={is_satisfied(cs, w)}")
print("circuit output equals hash:", output_values(cs, w) == [arion_hash([7, 8], params)])
