"""Dark/bright eigenstructure of the lossy three-level Hamiltonian.

Basis order throughout is (|1>, |3>, |2>): ground state driven by the
cavity, excited state, ground state driven by the control. The effective
non-Hermitian Hamiltonian is::

    [[0, g,  0      ],
     [g, w1, Omega_c],
     [0, Omega_c, w2]]

with ``w1 = delta - i*gamma3`` (single-photon) and ``w2 = Delta -
i*gamma12`` (two-photon). It is a cavity-free model used to explain the
transmission features, not a second route to the transmittance.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInputError, EigenConvergenceError, ParameterError
from .params import Direction, SystemParams, doppler_shifts

LABELS = ("dark", "bright_plus", "bright_minus")

_RESIDUAL_TOL = 1e-8
_CLUSTER_TOL = 1e-9


@dataclass(frozen=True)
class EffectiveHamiltonian:
    matrix: np.ndarray
    omega1: complex
    omega2: complex
    big_omega: float
    g: float
    omega_c: float

    @classmethod
    def from_values(cls, g: float, omega_c: float, omega1: complex = 0j,
                    omega2: complex = 0j) -> "EffectiveHamiltonian":
        g = float(g)
        omega_c = float(omega_c)
        omega1 = complex(omega1)
        omega2 = complex(omega2)
        m = np.array(
            [[0.0, g, 0.0], [g, omega1, omega_c], [0.0, omega_c, omega2]],
            dtype=np.complex128,
        )
        m.setflags(write=False)
        return cls(m, omega1, omega2, math.hypot(g, omega_c), g, omega_c)

    @property
    def gamma3(self) -> float:
        return -self.omega1.imag

    @property
    def gamma12(self) -> float:
        return -self.omega2.imag


@dataclass(frozen=True)
class EigenSet:
    """Eigenvalues and unit right eigenvectors, ordered as :data:`LABELS`.

    ``vectors[:, j]`` is the state labelled ``labels[j]``. ``normalizers``
    holds the Euclidean norms of the unnormalised approximate vectors and is
    ``None`` for the exact decomposition.
    """

    values: np.ndarray
    vectors: np.ndarray
    labels: tuple[str, str, str]
    normalizers: tuple[float, float, float] | None = None

    def by_label(self, label: str) -> tuple[complex, np.ndarray]:
        j = self.labels.index(label)
        return complex(self.values[j]), self.vectors[:, j]


@dataclass(frozen=True)
class DecayRates:
    dark_rate: float
    bright_rate: float


def build_effective_hamiltonian(p: SystemParams, d: Direction | str) -> EffectiveHamiltonian:
    shifts = doppler_shifts(p, Direction(d))
    delta = p.delta_p + shifts.single_photon
    two_photon = p.delta_p + shifts.two_photon - p.delta_c
    return EffectiveHamiltonian.from_values(
        p.g, p.omega_c_rabi, complex(delta, -p.gamma3), complex(two_photon, -p.gamma12)
    )


# --------------------------------------------------------------------------
# 3x3 eigensolver: closed-form cubic + Newton polish, null vectors by cross
# products of rows of (A - lambda I)
# --------------------------------------------------------------------------


def char_poly(a: np.ndarray) -> tuple[complex, complex, complex]:
    """Coefficients (c2, c1, c0) of ``lambda^3 + c2 lambda^2 + c1 lambda + c0``."""
    tr = a[0, 0] + a[1, 1] + a[2, 2]
    minors = (
        a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]
        + a[0, 0] * a[2, 2] - a[0, 2] * a[2, 0]
        + a[1, 1] * a[2, 2] - a[1, 2] * a[2, 1]
    )
    det = (
        a[0, 0] * (a[1, 1] * a[2, 2] - a[1, 2] * a[2, 1])
        - a[0, 1] * (a[1, 0] * a[2, 2] - a[1, 2] * a[2, 0])
        + a[0, 2] * (a[1, 0] * a[2, 1] - a[1, 1] * a[2, 0])
    )
    return complex(-tr), complex(minors), complex(-det)


def cubic_roots(c2: complex, c1: complex, c0: complex) -> np.ndarray:
    """Roots of a monic complex cubic (Cardano), each polished by one Newton step."""
    shift = c2 / 3.0
    p = c1 - c2 * c2 / 3.0
    q = 2.0 * c2**3 / 27.0 - c2 * c1 / 3.0 + c0
    disc = cmath.sqrt(q * q / 4.0 + p**3 / 27.0)
    # larger-magnitude branch avoids cancellation
    w = -q / 2.0 + disc
    if abs(-q / 2.0 - disc) > abs(w):
        w = -q / 2.0 - disc
    roots = np.empty(3, dtype=np.complex128)
    if w == 0:
        roots[:] = -shift
    else:
        u = w ** (1.0 / 3.0)
        rot = cmath.exp(2j * math.pi / 3.0)
        for k in range(3):
            uk = u * rot**k
            roots[k] = uk - p / (3.0 * uk) - shift
    for k in range(3):
        z = roots[k]
        f = ((z + c2) * z + c1) * z + c0
        df = (3.0 * z + 2.0 * c2) * z + c1
        if df != 0:
            roots[k] = z - f / df
    return roots


def _null_vector(m: np.ndarray) -> np.ndarray | None:
    best = None
    best_norm = 0.0
    for i, j in ((0, 1), (0, 2), (1, 2)):
        v = np.cross(m[i], m[j])
        n = np.linalg.norm(v)
        if n > best_norm:
            best, best_norm = v, n
    scale = max(np.abs(m).max(), 1.0) ** 2
    if best is None or best_norm <= 1e-12 * scale:
        return None
    return best / best_norm


def _fix_phase(v: np.ndarray) -> np.ndarray:
    k = int(np.argmax(np.abs(v)))
    return v * (abs(v[k]) / v[k])


def eig3(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues and unit right eigenvectors (columns) of a 3x3 matrix."""
    a = np.asarray(a, dtype=np.complex128)
    if a.shape != (3, 3):
        raise ValueError("eig3 expects a 3x3 matrix")
    if not np.all(np.isfinite(a)):
        raise EigenConvergenceError("matrix has non-finite entries", float("nan"))
    scale = float(np.abs(a).max())
    if scale == 0.0:
        return np.zeros(3, dtype=np.complex128), np.eye(3, dtype=np.complex128)
    b = a / scale
    roots = cubic_roots(*char_poly(b))
    vecs = np.empty((3, 3), dtype=np.complex128)
    done = [False] * 3
    for i in range(3):
        if done[i]:
            continue
        cluster = [j for j in range(i, 3) if not done[j] and abs(roots[j] - roots[i]) <= _CLUSTER_TOL]
        m = b - roots[i] * np.eye(3)
        v = _null_vector(m) if len(cluster) == 1 else None
        if v is not None:
            vecs[:, i] = _fix_phase(v)
        else:
            # repeated eigenvalue (or rank <= 1): take the numerical null space
            _, s, vh = np.linalg.svd(m)
            need = len(cluster)
            null = vh[3 - need:].conj()
            if s[3 - need] > 1e-7:
                raise EigenConvergenceError(
                    "defective eigenvalue: geometric multiplicity below algebraic",
                    float(s[3 - need]) * scale,
                )
            for col, j in zip(null, cluster):
                vecs[:, j] = _fix_phase(col / np.linalg.norm(col))
        for j in cluster:
            done[j] = True
    values = roots * scale
    residual = float(np.max(np.linalg.norm(a @ vecs - vecs * values, axis=0)))
    if residual > _RESIDUAL_TOL * scale:
        raise EigenConvergenceError("eigenpair residual above tolerance", residual)
    return values, vecs


# --------------------------------------------------------------------------
# approximate (analytic) eigenstates
# --------------------------------------------------------------------------


def approximate_eigenstates(h: EffectiveHamiltonian) -> EigenSet:
    """Analytic dark and bright states with eigenvalue estimates.

    Vectors in (|1>, |3>, |2>) order::

        E1 ~ (w1 w2 - Oc^2,               -g w2,         g Oc)
        E2 ~ ((W - w1)(W - w2) - Oc^2,    g (W - w2),    g Oc)
        E3 ~ ((W + w1)(W + w2) - Oc^2,   -g (W + w2),    g Oc)

    each divided by its Euclidean norm. Eigenvalue estimates come from the
    phase factors of the time-evolved state: ``(g/W)^2 w2`` for the dark
    state and ``+-W + (w1 + (Oc/W)^2 w2)/2`` for the bright pair.
    """
    g, oc, w1, w2, big = h.g, h.omega_c, h.omega1, h.omega2, h.big_omega
    raw = [
        np.array([w1 * w2 - oc**2, -g * w2, g * oc], dtype=np.complex128),
        np.array([(big - w1) * (big - w2) - oc**2, g * (big - w2), g * oc], dtype=np.complex128),
        np.array([(big + w1) * (big + w2) - oc**2, -g * (big + w2), g * oc], dtype=np.complex128),
    ]
    norms = tuple(float(np.linalg.norm(v)) for v in raw)
    scale = max(abs(g), abs(oc), abs(w1), abs(w2), 1e-300) ** 2
    for label, n in zip(LABELS, norms):
        if n <= 1e-14 * scale:
            raise DegenerateInputError(f"normalisation constant of the {label} state vanishes")
    if big == 0:
        raise DegenerateInputError("g = Omega_c = 0: no coupling")
    vectors = np.column_stack([v / n for v, n in zip(raw, norms)])
    mix = 0.5 * (w1 + (oc / big) ** 2 * w2)
    values = np.array([(g / big) ** 2 * w2, big + mix, -big + mix], dtype=np.complex128)
    return EigenSet(values, vectors, LABELS, norms)


def overlap(u: np.ndarray, v: np.ndarray) -> float:
    """``|<u|v>|`` for unit vectors."""
    return float(abs(np.vdot(u, v)))


def exact_eigendecompose(h: EffectiveHamiltonian) -> EigenSet:
    """Numerically exact eigenpairs, labelled against the analytic states.

    The dark label goes to the exact vector overlapping most with the
    analytic dark state. The printed bright vectors are poor once
    ``|w| * Omega`` rivals ``g^2``, so the bright pair is matched by
    eigenvalue instead. If the analytic states are degenerate (e.g.
    ``g = 0``) the dark label goes to the largest |1> weight and the bright
    labels follow the real part of the eigenvalue.
    """
    values, vecs = eig3(h.matrix)
    try:
        approx = approximate_eigenstates(h)
    except DegenerateInputError:
        approx = None
    if approx is not None:
        dark = int(np.argmax(np.abs(approx.vectors[:, 0].conj() @ vecs)))
        a, b = (j for j in range(3) if j != dark)
        est_plus, est_minus = approx.values[1], approx.values[2]
        straight = abs(values[a] - est_plus) + abs(values[b] - est_minus)
        swapped = abs(values[b] - est_plus) + abs(values[a] - est_minus)
        order = [dark, a, b] if straight <= swapped else [dark, b, a]
    else:
        dark = int(np.argmax(np.abs(vecs[0])))
        rest = sorted((j for j in range(3) if j != dark), key=lambda j: -values[j].real)
        order = [dark, rest[0], rest[1]]
    return EigenSet(values[order], vecs[:, order], LABELS, None)


def evolve_coefficients(h: EffectiveHamiltonian, t: float) -> np.ndarray:
    """Amplitudes on (E1, E2, E3) of the state prepared in |1> at ``t = 0``."""
    if t < 0:
        raise ParameterError("t", "must be >= 0")
    big = h.big_omega
    if big == 0:
        raise DegenerateInputError("g = Omega_c = 0: no coupling")
    ratio_g = h.g / big
    ratio_c = h.omega_c / big
    dark = -ratio_c * cmath.exp(-1j * ratio_g**2 * h.omega2 * t)
    common = ratio_g / math.sqrt(2.0) * cmath.exp(-0.5j * (h.omega1 + ratio_c**2 * h.omega2) * t)
    return np.array(
        [dark, common * cmath.exp(-1j * big * t), common * cmath.exp(1j * big * t)],
        dtype=np.complex128,
    )


def evolve_state(h: EffectiveHamiltonian, t: float) -> np.ndarray:
    """State vector at time ``t`` in the (|1>, |3>, |2>) basis."""
    coeffs = evolve_coefficients(h, t)
    return approximate_eigenstates(h).vectors @ coeffs


def decay_rates(h: EffectiveHamiltonian, cavity_kappa: float) -> DecayRates:
    """Dark-state and bright-state decay rates.

    The bright rate carries half the cavity linewidth, which the cavity-free
    Hamiltonian does not contain, so ``cavity_kappa`` is passed explicitly.
    """
    big2 = h.big_omega**2
    if big2 == 0:
        raise DegenerateInputError("g = Omega_c = 0: no coupling")
    dark = h.g**2 / big2 * h.gamma12
    bright = 0.5 * (h.gamma3 + 0.5 * cavity_kappa + h.omega_c**2 * h.gamma12 / big2)
    return DecayRates(dark, bright)
