"""Security estimates for a built-in profile and a small density run."""

from arion import profile
from arion.lab import density_experiment
from arion.security import full_report

report = full_report(profile("bn254_n3_d1-5_d2-257"))
for e in report.estimates:
    print(f"{e.kind.value:24s} {e.bits:5d} {' '.join(e.flags)}")

for rep in density_experiment(primes=(11, 13), seeds=2):
    print(f"p={rep.p} d1={rep.d1} d2={rep.d2} min density {rep.min_density:.3f} degrees {rep.degrees}")
