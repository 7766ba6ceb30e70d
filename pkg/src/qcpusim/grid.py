"""Periodic position grids and the discretized operators living on them.

A grid has N = 2^k points spaced L/N apart, either starting at the origin
(default) or centered on it.  Wavefunctions are plain amplitude vectors over
the grid points with periodic indexing.  The momentum operator is the
Hermitian central difference built from cyclic shifts; the kinetic operator
is its exact square over shift-by-two stencils.  Two-particle helpers cover
operator lifting, (anti)symmetrization, and the center-of-mass/relative
splitting of a pair problem.

Natural units throughout (hbar = 1); lengths, times, and masses are in
mutually consistent units.
"""

from __future__ import annotations

import inspect
import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import (
    DegenerateGrid,
    DimensionMismatch,
    GridMismatch,
    IndexOutOfRange,
    InvalidSpec,
    NonFiniteValue,
    NonPositiveMass,
    ZeroResultWarning,
)
from .numerics import CyclicShift, Diagonal, Dense, Transposition, densify, operator_dim, tensor


@dataclass(frozen=True)
class GridSpec:
    """Uniform periodic grid of 2**qubits points over a box of given length.

    Points are x_m = m * spacing for the default placement, or
    x_m = (m - N/2) * spacing when centered.  Centered grids suit symmetric
    potentials; the default keeps the box at [0, L).
    """

    length: float
    qubits: int
    centered: bool = False

    def __post_init__(self) -> None:
        if not isinstance(self.qubits, int) or isinstance(self.qubits, bool):
            raise InvalidSpec(f"qubit count must be an integer, got {self.qubits!r}")
        if self.qubits < 1:
            raise InvalidSpec(f"qubit count must be >= 1, got {self.qubits}")
        length = float(self.length)
        if not math.isfinite(length) or length <= 0.0:
            raise InvalidSpec(f"box length must be finite and positive, got {self.length!r}")
        object.__setattr__(self, "length", length)

    @property
    def size(self) -> int:
        return 2 ** self.qubits

    @property
    def spacing(self) -> float:
        return self.length / self.size

    @property
    def points(self) -> np.ndarray:
        m = np.arange(self.size, dtype=float)
        if self.centered:
            m = m - self.size // 2
        return m * self.spacing


@dataclass(frozen=True, eq=False)
class Wavefunction:
    """Amplitudes over the grid points at one instant; no auto-normalization."""

    grid: GridSpec
    amplitudes: np.ndarray
    time: float = 0.0

    def __post_init__(self) -> None:
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.ndim != 1 or amps.shape[0] != self.grid.size:
            raise DimensionMismatch(
                f"amplitudes must have length {self.grid.size}, got shape {amps.shape}"
            )
        object.__setattr__(self, "amplitudes", amps)

    def component(self, m: int) -> complex:
        """Amplitude at index m with periodic wrap-around."""
        return complex(self.amplitudes[m % self.grid.size])

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


@dataclass(frozen=True, eq=False)
class TwoParticleWavefunction:
    """Pair amplitudes indexed as (m1, m2) -> m1 * N2 + m2 (particle 1 slow)."""

    grid1: GridSpec
    grid2: GridSpec
    amplitudes: np.ndarray
    time: float = 0.0

    def __post_init__(self) -> None:
        amps = np.asarray(self.amplitudes, dtype=complex)
        expected = self.grid1.size * self.grid2.size
        if amps.ndim != 1 or amps.shape[0] != expected:
            raise DimensionMismatch(
                f"amplitudes must have length {expected}, got shape {amps.shape}"
            )
        object.__setattr__(self, "amplitudes", amps)

    def component(self, m1: int, m2: int) -> complex:
        n1, n2 = self.grid1.size, self.grid2.size
        return complex(self.amplitudes[(m1 % n1) * n2 + (m2 % n2)])


def _accepts_time(f) -> bool | None:
    """Whether f looks like f(x, t) rather than f(x); None if undecidable."""
    try:
        sig = inspect.signature(f)
    except (TypeError, ValueError):
        return None
    positional = 0
    for p in sig.parameters.values():
        if p.kind is inspect.Parameter.VAR_POSITIONAL:
            return True
        if p.kind in (inspect.Parameter.POSITIONAL_ONLY, inspect.Parameter.POSITIONAL_OR_KEYWORD):
            positional += 1
    return positional >= 2


def sample(f, grid: GridSpec, t: float = 0.0) -> Wavefunction:
    """Evaluate f on every grid point at time t; no normalization applied.

    Accepts either f(x) or f(x, t); the time argument is forwarded only when
    the callable takes it.
    """
    wants_time = _accepts_time(f)
    xs = grid.points
    values = np.empty(grid.size, dtype=complex)
    for m, x in enumerate(xs):
        if wants_time is None:
            try:
                val = f(x, t)
            except TypeError:
                val = f(x)
        else:
            val = f(x, t) if wants_time else f(x)
        values[m] = complex(val)
    if not np.all(np.isfinite(values.real) & np.isfinite(values.imag)):
        bad = int(np.flatnonzero(~(np.isfinite(values.real) & np.isfinite(values.imag)))[0])
        raise NonFiniteValue(f"sampled value at grid point {bad} (x = {xs[bad]}) is not finite")
    return Wavefunction(grid=grid, amplitudes=values, time=float(t))


# ---------------------------------------------------------------------------
# Single-particle operators
# ---------------------------------------------------------------------------

def momentum_operator(grid: GridSpec) -> Dense:
    """Hermitian central-difference momentum: -(i/2)(N/L)(S+ - S-).

    S+ and S- are the cyclic shifts by one grid point in either direction;
    averaging the left and right derivatives makes the result exactly
    Hermitian.  Plane-wave mode n is an eigenvector with eigenvalue
    (N/L) sin(2 pi n / N).
    """
    n = grid.size
    if n < 3:
        raise DegenerateGrid(
            f"momentum needs at least 3 grid points (shift-by-one stencil collides), got {n}"
        )
    s_plus = densify(CyclicShift(offset=1, dim=n))
    s_minus = densify(CyclicShift(offset=-1, dim=n))
    scale = -0.5j * (n / grid.length)
    return Dense(scale * (s_plus - s_minus))


def kinetic_operator(grid: GridSpec, mu: float) -> Dense:
    """Kinetic energy -(1/8 mu)(N/L)^2 (S+^2 + S-^2 - 2I), the exact square
    of the central-difference momentum divided by 2 mu.

    Plane-wave mode n has eigenvalue (1/4 mu)(N/L)^2 (1 - cos(4 pi n / N)).
    """
    if not (mu > 0.0) or not math.isfinite(mu):
        raise NonPositiveMass(f"mass must be positive and finite, got {mu!r}")
    n = grid.size
    if n < 4:
        raise DegenerateGrid(
            f"kinetic needs at least 4 grid points (shift-by-two stencil collides), got {n}"
        )
    s_plus = densify(CyclicShift(offset=1, dim=n))
    s_minus = densify(CyclicShift(offset=-1, dim=n))
    pref = (n / grid.length) ** 2
    mat = -(pref / (8.0 * mu)) * (s_plus @ s_plus + s_minus @ s_minus - 2.0 * np.eye(n))
    return Dense(mat)


def kinetic_exchange_payload(grid: GridSpec, mu: float) -> np.ndarray:
    """Kinetic matrix assembled dyad by dyad from exchange permutations.

    Each off-diagonal term |x_m><x_{m+/-2}| is realized as the projector
    |x_m><x_m| times the transposition exchanging basis states m and m+/-2;
    the diagonal part is the identity-proportional remainder.  Agrees with
    kinetic_operator entry for entry.
    """
    if not (mu > 0.0) or not math.isfinite(mu):
        raise NonPositiveMass(f"mass must be positive and finite, got {mu!r}")
    n = grid.size
    if n < 4:
        raise DegenerateGrid(
            f"kinetic needs at least 4 grid points (shift-by-two stencil collides), got {n}"
        )
    pref = (n / grid.length) ** 2
    coef = -(pref / (8.0 * mu))
    out = (pref / (4.0 * mu)) * np.eye(n, dtype=float)
    for m in range(n):
        projector = np.zeros((n, n))
        projector[m, m] = 1.0
        for shift in (2, -2):
            target = (m + shift) % n
            out = out + coef * (projector @ densify(Transposition(a=m, b=target, dim=n)).real)
    return out.astype(complex)


def potential_operator(grid: GridSpec, v: Callable[[float], float]) -> Diagonal:
    """Diagonal multiplication operator with entries v(x_m)."""
    values = np.empty(grid.size, dtype=float)
    for m, x in enumerate(grid.points):
        values[m] = float(v(x))
    if not np.all(np.isfinite(values)):
        bad = int(np.flatnonzero(~np.isfinite(values))[0])
        raise NonFiniteValue(f"potential at grid point {bad} (x = {grid.points[bad]}) is not finite")
    return Diagonal(values.astype(complex))


def two_body_potential(grid1: GridSpec, grid2: GridSpec, u) -> Diagonal:
    """Diagonal pair interaction with entries u(x_{m1}, x_{m2}).

    Index convention matches TwoParticleWavefunction: particle 1 is the slow
    index, so entry m1 * N2 + m2 holds u evaluated at the pair of points.
    """
    xs1, xs2 = grid1.points, grid2.points
    values = np.empty(grid1.size * grid2.size, dtype=float)
    for m1, a in enumerate(xs1):
        for m2, b in enumerate(xs2):
            values[m1 * grid2.size + m2] = float(u(a, b))
    if not np.all(np.isfinite(values)):
        raise NonFiniteValue("two-body potential takes a non-finite value on the grid product")
    return Diagonal(values.astype(complex))


def lift_one(op, slot: int, dims: tuple[int, int]) -> np.ndarray:
    """Embed a one-particle operator into the pair space on the given slot."""
    if slot not in (1, 2):
        raise IndexOutOfRange(f"slot must be 1 or 2, got {slot}")
    n1, n2 = dims
    own = n1 if slot == 1 else n2
    if operator_dim(op) != own:
        raise DimensionMismatch(
            f"operator dim {operator_dim(op)} does not match slot {slot} size {own}"
        )
    if slot == 1:
        return tensor(densify(op), np.eye(n2))
    return tensor(np.eye(n1), densify(op))


def symmetrize(psi: TwoParticleWavefunction, sign: int) -> TwoParticleWavefunction:
    """Project onto the exchange-(anti)symmetric subspace: (psi + sign * swap)/2.

    Annihilation (e.g. antisymmetrizing an identical product state) is
    flagged with ZeroResultWarning and returns the zero wavefunction.
    """
    if sign not in (1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign!r}")
    if psi.grid1 != psi.grid2:
        raise GridMismatch("symmetrization needs both particles on the same grid")
    n = psi.grid1.size
    a = psi.amplitudes.reshape(n, n)
    out = (a + sign * a.T) / 2.0
    if not np.any(out):
        warnings.warn("symmetrization annihilated the state", ZeroResultWarning)
    return TwoParticleWavefunction(
        grid1=psi.grid1, grid2=psi.grid2, amplitudes=out.ravel(), time=psi.time
    )


@dataclass(frozen=True)
class DecoupledProblem:
    """One of the two independent problems a pair problem splits into."""

    mass: float
    potential: Callable[[float], float] | None = None


@dataclass(frozen=True)
class ComReduction:
    com: DecoupledProblem
    rel: DecoupledProblem


def com_reduction(mu1: float, mu2: float, interaction=None) -> ComReduction:
    """Split a two-body problem into center-of-mass and relative problems.

    The center of mass is a free particle of total mass mu1 + mu2; the
    relative coordinate is a single body of reduced mass mu1*mu2/(mu1+mu2)
    moving in the interaction potential evaluated at the separation.
    """
    for label, mu in (("mu1", mu1), ("mu2", mu2)):
        if not (mu > 0.0) or not math.isfinite(mu):
            raise NonPositiveMass(f"{label} must be positive and finite, got {mu!r}")
    total = mu1 + mu2
    return ComReduction(
        com=DecoupledProblem(mass=total, potential=None),
        rel=DecoupledProblem(mass=mu1 * mu2 / total, potential=interaction),
    )


# ---------------------------------------------------------------------------
# Fourier basis and analytic eigenvalues
# ---------------------------------------------------------------------------

def dft_operator(grid: GridSpec) -> np.ndarray:
    """Discrete Fourier matrix F_{mn} = e^{+2 pi i m n / N} / sqrt(N).

    Column n is plane-wave mode n, so F maps the position basis state |n>
    to that mode.  The inverse transform is the conjugate transpose.
    """
    n = grid.size
    m = np.arange(n)
    phase = np.outer(m, m) % n
    return np.exp(2j * np.pi * phase / n) / np.sqrt(n)


def plane_wave_mode(grid: GridSpec, n: int) -> np.ndarray:
    """Normalized plane-wave vector with components e^{i 2 pi n m / N} / sqrt(N)."""
    size = grid.size
    phase = (n * np.arange(size)) % size
    return np.exp(2j * np.pi * phase / size) / np.sqrt(size)


def momentum_eigenvalue(grid: GridSpec, n: int) -> float:
    """Eigenvalue of the central-difference momentum on plane-wave mode n."""
    return (grid.size / grid.length) * math.sin(2.0 * math.pi * n / grid.size)


def kinetic_eigenvalue(grid: GridSpec, mu: float, n: int) -> float:
    """Eigenvalue of the shift-by-two kinetic operator on plane-wave mode n.

    The mode index is folded onto min(n, N - n) before evaluating, which
    makes the n <-> N - n degeneracy exact in floating point rather than
    merely up to trig rounding.
    """
    if not (mu > 0.0) or not math.isfinite(mu):
        raise NonPositiveMass(f"mass must be positive and finite, got {mu!r}")
    size = grid.size
    folded = n % size
    folded = min(folded, size - folded)
    pref = (size / grid.length) ** 2
    return (pref / (4.0 * mu)) * (1.0 - math.cos(4.0 * math.pi * folded / size))


def signed_mode(n: int, size: int) -> int:
    """Wrap a mode index into [-N/2, N/2): mode N-1 is momentum -1, not N-1."""
    m = n % size
    return m - size if m >= size // 2 else m


def signed_momentum(grid: GridSpec, n: int) -> float:
    """Physical momentum 2 pi n_signed / L carried by plane-wave mode n."""
    return 2.0 * math.pi * signed_mode(n, grid.size) / grid.length


# ---------------------------------------------------------------------------
# Wire format
# ---------------------------------------------------------------------------

def wavefunction_header(grid: GridSpec) -> dict:
    return {"L": grid.length, "k": grid.qubits, "N": grid.size, "centered": grid.centered}


def wavefunction_records(wf: Wavefunction) -> list[dict]:
    """Per-point dump rows: index, position, amplitude parts, probability."""
    xs = wf.grid.points
    rows = []
    for m in range(wf.grid.size):
        z = wf.amplitudes[m]
        rows.append(
            {
                "m": m,
                "x": float(xs[m]),
                "re": float(z.real),
                "im": float(z.imag),
                "prob": float(abs(z) ** 2),
            }
        )
    return rows
