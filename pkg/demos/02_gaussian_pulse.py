"""Gaussian pulse benchmark: convergence of the scheme family in time.

A decaying Gaussian (an exact heat-equation solution) is solved on
[0, 2.5] with 50 cells and an increasing number of time levels.  The
plain scheme (theta = 0) stalls at its spatial error floor, while the
higher-order averaging (theta = 1/12) keeps converging; at M = 2000 it
is about 700 times more accurate on the same mesh.
"""

from parabolic_dtbc import (SchemeConfig, build_mesh, error_report, example1,
                            march)

problem, exact = example1()
LEVELS = (20, 50, 100, 200, 500, 1000, 2000)

print("max-abs error vs the closed-form pulse, h = 0.05, T = 1")
print("M".rjust(6), "theta=0".rjust(12), "theta=1/12".rjust(12))
rows = {}
for M in LEVELS:
    mesh = build_mesh(2.5, 50, tau=1.0 / M, M=M)
    errs = []
    for theta in (0.0, 1.0 / 12.0):
        result = march(problem, mesh, SchemeConfig(0.5, theta, "dtbc"))
        errs.append(error_report(result.U, exact, mesh).max_abs_error)
    rows[M] = errs
    print(f"{M:6d} {errs[0]:12.3e} {errs[1]:12.3e}")

floor = rows[2000][0]
gain = rows[2000][0] / rows[2000][1]
print(f"\ntheta=0 stalls near {floor:.2e} once time error drops below the "
      f"spatial floor; theta=1/12 is {gain:.0f}x more accurate at M = 2000.")
print("The initial pulse is only ~3.7e-6 at the truncation point, so the "
      "transparent closure treats it as effectively zero; the residual "
      "error floor of the 1/12 scheme reflects exactly that leftover tail.")
