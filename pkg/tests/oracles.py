"""Independent reference evaluations used to pin golden values.

Nothing here imports the package: every formula is re-typed from scratch in
arbitrary precision, or solved by brute force.
"""
import mpmath as mp

mp.mp.dps = 50

TWO_PI_MHZ = 2 * mp.pi * mp.mpf(10) ** 6
KAPPA1 = mp.mpf("0.5") * TWO_PI_MHZ
KAPPA2 = 4 * TWO_PI_MHZ
KAPPA_C = 6 * TWO_PI_MHZ
KAPPA = KAPPA1 + KAPPA2 + KAPPA_C
GAMMA3 = mp.mpf("14.3") * TWO_PI_MHZ
GAMMA12 = mp.mpf("10.6e6")
WAVELENGTH = mp.mpf("637.2e-9")


def chi_mp(g, omega_c, velocity, counter, delta_p=0, n=1, printed=True):
    kv = 2 * mp.pi * n / WAVELENGTH * velocity
    if not counter:
        s1, s2 = kv, 0
    elif printed:
        s1, s2 = kv, 2 * kv
    else:
        s1, s2 = -kv, -2 * kv
    denom = GAMMA3 + 1j * (delta_p + s1) + omega_c**2 / (GAMMA12 + 1j * (delta_p + s2))
    return -1j * g**2 / denom


def amplitude_mp(g, omega_c, velocity, counter, delta_p=0):
    chi = chi_mp(g, omega_c, velocity, counter, delta_p)
    return mp.sqrt(KAPPA1) / (1j * delta_p + KAPPA / 2 + 1j * chi)


def transmittance_mp(g, omega_c, velocity, counter, delta_p=0):
    chi = chi_mp(g, omega_c, velocity, counter, delta_p)
    return abs(mp.sqrt(KAPPA1 * KAPPA2) / (1j * delta_p + KAPPA / 2 + 1j * chi)) ** 2
