"""Exact rational certificates for the variable-count inequalities.

For each (degree, genus) pair the sweep walks every admissible divisor
degree, jet order, and section degree in a window above the calibrated
threshold, evaluates the bound ratio in exact integer arithmetic, and
asserts it stays strictly below the theorem's variable count.  The
calibration identities pin the thresholds: at e0 the leading case bound
equals the target exactly.
"""

import time

from jetsums.bounds import calibration_report, certify, degree_floor

print("calibration identities (exact rational arithmetic)")
for item in calibration_report(g_max=10, d_max=6):
    print(f"  {'ok ' if item['ok'] else 'FAIL'} {item['name']}")

print()
print("sweep certificates (100 degrees above threshold, jet orders 1..50)")
for mode, d, g in [
    ("canonical", 2, 1), ("canonical", 3, 1), ("terminal", 2, 1),
]:
    t0 = time.time()
    cert = certify(mode, d, g)
    print(
        f"  {mode} d={d} g={g}: n+1={cert.n_plus_1}, threshold e0="
        f"{degree_floor(mode, d, g)}, max bound={cert.max_bound} at "
        f"{cert.witness} -> {cert.verdict} ({time.time() - t0:.1f}s, "
        f"{cert.grid_points} points)"
    )

print()
print("note how close the maxima sit below the targets: the thresholds are")
print("calibrated so the strict inequality barely survives, which is why")
print("the sweep runs on exact fractions rather than floats")
