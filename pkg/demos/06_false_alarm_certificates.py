"""False-alarm certificates: which thresholds are safe on paper.

Given the clean bit-zero probability q, a secure-phase length M and a
network size N, the certificate machinery produces a threshold h_min
such that the expected false-alarm period is provably at least kappa.
The guarantee is loose by design. It also tells you when M*N is simply
too small for any guarantee at all.
"""

from bitcusum import InfeasibleMN, build_certificate, format_certificate

print(format_certificate(build_certificate(0.5, 1000.0, 5000, 12)))

print("\nh_min as the target period and the secure phase move:")
print(f"{'kappa':>8} {'M':>6} {'h_min':>12}")
for kappa in (200.0, 1000.0, 5000.0):
    for m in (1000, 5000):
        cert = build_certificate(0.5, kappa, m, 12)
        print(f"{kappa:>8.0f} {m:>6} {cert.h_min:>12.1f}")

# Skewed quantizers certify more cheaply: the large-deviation rates
# grow as q leaves 1/2, so the per-observation information is higher.
print("\nsame kappa = 1000, M = 5000, N = 12, sweeping q:")
for q in (0.5, 0.6, 0.75, 0.9):
    cert = build_certificate(q, 1000.0, 5000, 12)
    print(f"  q = {q:4.2f}  upsilon* = {cert.upsilon_star:.4f}  "
          f"h_min = {cert.h_min:10.1f}")

try:
    build_certificate(0.5, 200.0, 1, 2)
except InfeasibleMN as exc:
    print(f"\nM = 1, N = 2 is refused outright: {exc}")
