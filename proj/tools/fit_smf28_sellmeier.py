#!/usr/bin/env python3
"""Derive the `smf28` Sellmeier coefficients used by the library.

The effective index of standard single-mode fiber is built from its
dispersion law D(λ) = S0/4·(λ − λ0⁴/λ³) (λ0 = 1313 nm, S0 = 0.086 ps/nm²/km),
integrated twice: n'' from D, n' pinned to bulk silica at 1550 nm, and n
fixed by the group index 1.4682 at 1550 nm. The three-term Sellmeier form is
then fitted over 1400–1700 nm, keeping the two UV resonances of fused silica
and freeing the strengths and the IR resonance.

Requires numpy and scipy.
"""

import numpy as np
from scipy.integrate import cumulative_trapezoid
from scipy.optimize import least_squares

C_LIGHT = 299792458.0
B_SILICA = [0.6961663, 0.4079426, 0.8974794]
C_SILICA = [0.0684043**2, 0.1162414**2, 9.896161**2]
LAMBDA0_NM, S0 = 1313.0, 0.086
GROUP_INDEX_1550 = 1.4682


def sellmeier(l_um, b, c):
    l2 = l_um**2
    return np.sqrt(1 + sum(bi * l2 / (l2 - ci) for bi, ci in zip(b, c)))


def target_index(lam):
    d = S0 / 4 * (lam - LAMBDA0_NM**4 / lam**3)  # ps/(nm·km)
    n2 = -C_LIGHT * d * 1e-6 / (lam * 1e-9) * 1e-18  # d²n/dλ², 1/nm²
    i0 = np.argmin(abs(lam - 1550))
    n1 = cumulative_trapezoid(n2, lam, initial=0)
    n1 -= n1[i0]
    bulk = lambda x: sellmeier(x / 1000, B_SILICA, C_SILICA)
    h = 0.01
    n1 += (bulk(1550 + h) - bulk(1550 - h)) / (2 * h)
    n = cumulative_trapezoid(n1, lam, initial=0)
    n += GROUP_INDEX_1550 + 1550 * n1[i0] - n[i0]
    return n


def main():
    lam = np.linspace(1400, 1700, 3001)
    n = target_index(lam)

    def unpack(p):
        return [p[0], p[1], p[2]], [C_SILICA[0], C_SILICA[1], p[3]]

    p0 = np.array(B_SILICA + [C_SILICA[2]])
    fit = least_squares(lambda p: (sellmeier(lam / 1000, *unpack(p)) - n) * 1e6, p0, x_scale=np.abs(p0),
                        xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=50000)
    b, c = unpack(fit.x)
    print("B     =", ", ".join(f"{v:.12g}" for v in b))
    print("C_um2 =", ", ".join(f"{v:.12g}" for v in c))
    print(f"max |residual| = {np.abs(fit.fun).max():.3g} x 1e-6")
    f = lambda x: sellmeier(x / 1000, b, c)
    print(" lambda_nm  n            n_g          D_fit    D_law")
    for l in [1400, 1450, 1500, 1550, 1600, 1650, 1700]:
        d2 = f(l + 1) - 2 * f(l) + f(l - 1)
        d_fit = -(l * 1e-9) / C_LIGHT * d2 * 1e18 * 1e6
        ng = f(l) - l * (f(l + 0.01) - f(l - 0.01)) / 0.02
        print(f" {l:9.0f}  {f(l):.9f}  {ng:.9f}  {d_fit:7.3f}  {S0 / 4 * (l - LAMBDA0_NM**4 / l**3):7.3f}")


if __name__ == "__main__":
    main()
