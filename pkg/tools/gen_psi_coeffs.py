"""One-time generator for the frozen Psi Taylor table in hardyz/hardy.py.

Psi(1/2 + w) = -cos(2 pi w^2 - 5 pi/8) / cos(2 pi w) is entire, but the
series division is ill conditioned in double precision (1/cos has poles at
|w| = 1/4), so the quotient is computed at 60 digits and rounded once.

Run:  python tools/gen_psi_coeffs.py   (needs mpmath; dev only)
"""
import mpmath as mp

mp.mp.dps = 60
ORDER = 72


def main() -> None:
    num = [mp.mpf(0)] * ORDER
    den = [mp.mpf(0)] * ORDER
    c58, s58 = mp.cos(5 * mp.pi / 8), mp.sin(5 * mp.pi / 8)
    for m in range(0, ORDER // 2 + 1):
        f2m = mp.factorial(2 * m)
        if 4 * m < ORDER:
            num[4 * m] += c58 * (-1) ** m * (2 * mp.pi) ** (2 * m) / f2m
        if 4 * m + 2 < ORDER:
            num[4 * m + 2] += (
                s58 * (-1) ** m * (2 * mp.pi) ** (2 * m + 1) / mp.factorial(2 * m + 1)
            )
        if 2 * m < ORDER:
            den[2 * m] = -((-1) ** m) * (2 * mp.pi) ** (2 * m) / f2m
    psi = [mp.mpf(0)] * ORDER
    for k in range(ORDER):
        acc = num[k]
        for j in range(1, k + 1):
            acc -= den[j] * psi[k - j]
        psi[k] = acc / den[0]

    def direct(p):
        return mp.cos(2 * mp.pi * (p * p - p - mp.mpf(1) / 16)) / mp.cos(2 * mp.pi * p)

    for p in (0.02, 0.1, 0.31, 0.85, 0.98):
        w = mp.mpf(p) - mp.mpf(1) / 2
        val = sum(psi[k] * w**k for k in range(ORDER))
        resid = val - direct(mp.mpf(p))
        assert abs(resid) < mp.mpf("1e-40"), (p, resid)

    vals = [float(x) for x in psi]
    for i in range(0, len(vals), 3):
        print("    " + ", ".join(repr(v) for v in vals[i : i + 3]) + ",")


if __name__ == "__main__":
    main()
