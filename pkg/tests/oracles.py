"""Independent reference computations used to check the library.

Nothing here imports wecr; these are deliberately naive re-derivations.
"""

from mpmath import mp, mpf, log

mp.dps = 50


def entropy_hp(fractions):
    """Term-by-term entropy in bits at 50 significant digits, on the fractions as given."""
    ps = [mpf(p) for p in fractions]
    return -mp.fsum(p * log(p, 2) for p in ps if p > 0)


def grid_feasible_n(h_min, h_max, d, r_mid, r_half, n_values=range(1, 13), steps=101):
    """Brute force over the N x H grid, in exact-ish decimal arithmetic."""
    lo, hi = mpf(r_mid) - mpf(r_half), mpf(r_mid) + mpf(r_half)
    h_min, h_max = mpf(h_min), mpf(h_max)
    hs = [h_min + (h_max - h_min) * k / (steps - 1) for k in range(steps)]
    return [n for n in n_values if any(lo <= 100 * mpf(d) / (n * h) <= hi for h in hs)]


# Published aggregate rows: (h_min, h_max, d, r_mid, r_halfwidth)
PUBLISHED_ROWS = {
    "aluminum-capacitor": (0.80, 1.25, 4.05, 68, 14),
    "tantalum-capacitor": (1.18, 1.91, 4.00, 45, 11),
    "ic": (1.04, 1.75, 3.85, 33, 8),
    "diode": (0.69, 0.96, 5.40, 76, 12),
    "transistor": (0.85, 1.81, 3.10, 58, 21),
    "resistor": (1.51, 2.00, 4.15, 39, 6),
    "inductor": (1.10, 1.42, 3.25, 52, 7),
}
