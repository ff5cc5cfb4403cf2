"""Unitary propagation and closed-form solutions for the two-level presets.

The integrator is the midpoint exponential rule: each step applies
``exp(-i * H(t_mid) * dt / hbar)`` with the generator sampled at the step
midpoint.  Two-level generators use the exact Pauli exponential; larger ones
a scaling-and-squaring Taylor series.  Either way every step is unitary to
round-off, so norm drift is a genuine error signal rather than an expected
artifact, and it is checked at every step.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Any, Mapping, Sequence

import numpy as np

from .errors import (
    DimensionMismatchError,
    FormulaError,
    GridError,
    IntegrationError,
)
from .hamiltonian import (
    Hamiltonian,
    PAULI_X,
    PAULI_Y,
    PAULI_Z,
    hamiltonian_from_json,
    hamiltonian_to_json,
    require_hermitian,
)
from .states import QuantumState

#: Cumulative norm drift beyond which propagation aborts.
MAX_NORM_DRIFT = 1e-9

#: Relative truncation target of the Taylor series behind the general-dim
#: matrix exponential.
_EXPM_SERIES_TOL = 1e-14

_ID2 = np.eye(2, dtype=complex)


def propagator_static(epsilon: float, t: float, hbar: float = 1.0) -> np.ndarray:
    """Closed-form propagator of H = epsilon*sigma_x.

    U(t) = cos(epsilon*t/hbar) * I - i*sin(epsilon*t/hbar) * sigma_x.
    """
    _check_positive(epsilon=epsilon, hbar=hbar)
    if t < 0.0:
        raise ValueError(f"t must be nonnegative, got {t!r}")
    theta = epsilon * t / hbar
    return math.cos(theta) * _ID2 - 1j * math.sin(theta) * PAULI_X


def propagator_driven(
    epsilon: float, omega: float, omega0: float, t: float, hbar: float = 1.0
) -> np.ndarray:
    """Closed-form rotating-frame propagator of the driven two-level system.

    With detuning D = hbar*(omega - omega0) and kappa = sqrt(eps^2 + D^2/4):

        U(t) = cos(kappa*t/hbar)*I
               - i*sin(kappa*t/hbar) * [ (D/(2*kappa))*sigma_z
                                         + (eps/kappa)*sigma_x ].

    This is the exponential of the constant co-rotating generator
    eps*sigma_x + (D/2)*sigma_z; see :class:`~qgeo.hamiltonian.TwoLevelDriven`
    for how it relates to the laboratory-frame observable.
    """
    _check_positive(epsilon=epsilon, omega=omega, omega0=omega0, hbar=hbar)
    if t < 0.0:
        raise ValueError(f"t must be nonnegative, got {t!r}")
    detuning = hbar * (omega - omega0)
    kappa = math.hypot(epsilon, 0.5 * detuning)
    x = kappa * t / hbar
    axis = (0.5 * detuning / kappa) * PAULI_Z + (epsilon / kappa) * PAULI_X
    return math.cos(x) * _ID2 - 1j * math.sin(x) * axis


def _check_positive(**params: float) -> None:
    for name, value in params.items():
        if not value > 0.0:
            raise ValueError(f"{name} must be positive, got {value!r}")


def expm_unitary_step(h_matrix: np.ndarray, dt: float, hbar: float) -> np.ndarray:
    """exp(-i * H * dt / hbar) for a Hermitian matrix of any dimension."""
    m = np.asarray(h_matrix, dtype=complex)
    if m.shape[0] == 2:
        return _expm_two_level(m, dt, hbar)
    return _expm_series(-1j * m * (dt / hbar))


def _expm_two_level(m: np.ndarray, dt: float, hbar: float) -> np.ndarray:
    """Exact Pauli-decomposition exponential for a Hermitian 2x2 matrix."""
    c0 = 0.5 * (m[0, 0].real + m[1, 1].real)
    cz = 0.5 * (m[0, 0].real - m[1, 1].real)
    cx = m[0, 1].real
    cy = -m[0, 1].imag
    r = math.sqrt(cx * cx + cy * cy + cz * cz)
    phase = complex(np.exp(-1j * c0 * dt / hbar))
    if r == 0.0:
        return phase * _ID2
    theta = r * dt / hbar
    axis = (cx * PAULI_X + cy * PAULI_Y + cz * PAULI_Z) / r
    return phase * (math.cos(theta) * _ID2 - 1j * math.sin(theta) * axis)


def _expm_series(a: np.ndarray) -> np.ndarray:
    """Scaling-and-squaring Taylor exponential, truncated at 1e-14 relative."""
    norm = float(np.linalg.norm(a, 1))
    squarings = 0 if norm <= 0.5 else int(math.ceil(math.log2(norm / 0.5)))
    x = a / (2.0**squarings)
    total = np.eye(a.shape[0], dtype=complex)
    term = np.eye(a.shape[0], dtype=complex)
    for k in range(1, 60):
        term = term @ x / k
        total = total + term
        if np.linalg.norm(term, 1) <= _EXPM_SERIES_TOL * np.linalg.norm(total, 1):
            break
    else:  # pragma: no cover - norm is capped at 0.5, series always converges
        raise IntegrationError("matrix-exponential series failed to converge")
    for _ in range(squarings):
        total = total @ total
    return total


@dataclass(frozen=True, eq=False)
class EvolutionTrace:
    """Discretized evolution: nodes, states, and per-node energy statistics.

    ``energy_mean[i]`` and ``energy_dispersion[i]`` are always statistics of
    the energy *observable* at ``times[i]`` in the state ``states[i]``, so
    they can be recomputed from the Hamiltonian spec that produced the trace.
    """

    times: np.ndarray
    states: tuple[QuantumState, ...]
    energy_mean: np.ndarray
    energy_dispersion: np.ndarray
    hbar: float = 1.0

    def __post_init__(self) -> None:
        times = np.array(self.times, dtype=float)
        mean = np.array(self.energy_mean, dtype=float)
        disp = np.array(self.energy_dispersion, dtype=float)
        states = tuple(self.states)
        if times.ndim != 1 or times.size == 0:
            raise GridError(f"times must be a nonempty 1-D array, got {times.shape}")
        n = times.size
        if not (len(states) == mean.size == disp.size == n):
            raise GridError(
                f"inconsistent trace lengths: {n} times, {len(states)} states, "
                f"{mean.size} means, {disp.size} dispersions"
            )
        if n > 1 and not np.all(np.diff(times) > 0.0):
            raise GridError("times must be strictly increasing")
        if np.any(disp < 0.0):
            raise ValueError("energy dispersion samples must be nonnegative")
        if not self.hbar > 0.0:
            raise ValueError(f"hbar must be positive, got {self.hbar!r}")
        dims = {s.dim for s in states}
        if len(dims) != 1:
            raise DimensionMismatchError(f"states have mixed dimensions: {dims}")
        for arr in (times, mean, disp):
            arr.setflags(write=False)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "energy_mean", mean)
        object.__setattr__(self, "energy_dispersion", disp)
        object.__setattr__(self, "states", states)

    @property
    def n_nodes(self) -> int:
        return int(self.times.size)

    @property
    def dim(self) -> int:
        return self.states[0].dim

    @property
    def duration(self) -> float:
        return float(self.times[-1] - self.times[0])

    @property
    def initial_state(self) -> QuantumState:
        return self.states[0]

    @property
    def final_state(self) -> QuantumState:
        return self.states[-1]

    def is_uniform(self, rel_tol: float = 1e-9) -> bool:
        """True when all node spacings agree to ``rel_tol`` relatively."""
        if self.n_nodes < 2:
            return True
        dts = np.diff(self.times)
        dt = self.duration / (self.n_nodes - 1)
        return bool(np.max(np.abs(dts - dt)) <= rel_tol * dt)

    def grid_spacing(self, rel_tol: float = 1e-9) -> float:
        """The common node spacing; raises GridError on non-uniform grids."""
        if self.n_nodes < 2:
            raise GridError("a single-node trace has no spacing")
        if not self.is_uniform(rel_tol):
            raise GridError("trace grid is not uniform")
        return self.duration / (self.n_nodes - 1)

    def to_json(self, hamiltonian: Hamiltonian | None = None) -> dict[str, Any]:
        """JSON envelope with hbar, optional Hamiltonian spec, and all arrays."""
        h_json: dict[str, Any] | None
        if hamiltonian is None:
            h_json = None
        else:
            try:
                h_json = hamiltonian_to_json(hamiltonian)
            except ValueError:
                h_json = None  # a bare callable has no serialized form
        return {
            "hbar": float(self.hbar),
            "hamiltonian": h_json,
            "times": [float(t) for t in self.times],
            "states": [s.to_json() for s in self.states],
            "energy_mean": [float(x) for x in self.energy_mean],
            "energy_dispersion": [float(x) for x in self.energy_dispersion],
        }

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> "EvolutionTrace":
        return cls(
            times=np.asarray(data["times"], dtype=float),
            states=tuple(QuantumState.from_json(s) for s in data["states"]),
            energy_mean=np.asarray(data["energy_mean"], dtype=float),
            energy_dispersion=np.asarray(data["energy_dispersion"], dtype=float),
            hbar=float(data["hbar"]),
        )

    def to_csv(self, target: Any) -> None:
        """Write one row per node: t, amplitudes (re/im interleaved), stats."""
        if hasattr(target, "write"):
            self._write_csv(target)
        else:
            with open(target, "w", newline="") as fh:
                self._write_csv(fh)

    def _write_csv(self, fh: io.TextIOBase) -> None:
        writer = csv.writer(fh)
        header = ["t"]
        for k in range(self.dim):
            header += [f"re_{k}", f"im_{k}"]
        header += ["energy_mean", "energy_dispersion"]
        writer.writerow(header)
        for i in range(self.n_nodes):
            row: list[float] = [self.times[i]]
            amps = self.states[i].amplitudes
            for k in range(self.dim):
                row += [amps[k].real, amps[k].imag]
            row += [self.energy_mean[i], self.energy_dispersion[i]]
            writer.writerow([repr(float(x)) for x in row])


def trace_hamiltonian_from_json(data: Mapping[str, Any]) -> Hamiltonian | None:
    """Recover the Hamiltonian spec stored in a trace envelope, if any."""
    h_json = data.get("hamiltonian")
    if h_json is None:
        return None
    return hamiltonian_from_json(h_json, hbar=float(data.get("hbar", 1.0)))


def _node_statistics(
    h: Hamiltonian, psis: np.ndarray, times: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Energy mean and dispersion of the observable at every node."""
    if h.sample_is_constant:
        m = h.sample(0.0)
        hv = psis @ m.T  # row i is (M psi_i)
        mean = np.real(np.einsum("ij,ij->i", psis.conj(), hv))
        second = np.real(np.einsum("ij,ij->i", hv.conj(), hv))
    else:
        mean = np.empty(times.size)
        second = np.empty(times.size)
        for i, t in enumerate(times):
            m = h.sample(float(t))
            hv_i = m @ psis[i]
            mean[i] = np.real(np.vdot(psis[i], hv_i))
            second[i] = np.real(np.vdot(hv_i, hv_i))
    var = second - mean * mean
    scale = max(float(np.max(np.abs(h.sample(float(times[0]))))), 1.0)
    if np.any(var < -1e-12 * scale * scale):
        raise FormulaError("negative energy variance beyond round-off")
    return mean, np.sqrt(np.clip(var, 0.0, None))


def evolve(
    h: Hamiltonian, psi0: QuantumState, t_final: float, steps: int
) -> EvolutionTrace:
    """Propagate ``psi0`` under ``h`` on a uniform grid of ``steps`` steps.

    Args:
        h: Hamiltonian spec; its ``generator`` drives the motion and its
            ``sample`` provides the recorded energy statistics.
        psi0: initial state, same dimension as ``h``.
        t_final: final time, >= 0.  Zero yields a single-node trace.
        steps: number of uniform steps, >= 2.

    Returns:
        An :class:`EvolutionTrace` with ``steps + 1`` nodes.

    Raises:
        IntegrationError: if the cumulative norm drift ever exceeds 1e-9
            (each individual step is unitary to ~1e-15, so this signals a
            genuinely broken generator, not an accumulation artifact).
    """
    if psi0.dim != h.dim:
        raise DimensionMismatchError(
            f"state dimension {psi0.dim} does not match Hamiltonian dimension {h.dim}"
        )
    if t_final < 0.0:
        raise ValueError(f"t_final must be nonnegative, got {t_final!r}")
    if int(steps) != steps or steps < 2:
        raise ValueError(f"steps must be an integer >= 2, got {steps!r}")
    steps = int(steps)

    if t_final == 0.0:
        times = np.array([0.0])
        psis = psi0.amplitudes[np.newaxis, :]
        mean, disp = _node_statistics(h, psis, times)
        return EvolutionTrace(times, (psi0,), mean, disp, hbar=h.hbar)

    times = np.linspace(0.0, t_final, steps + 1)
    dt = t_final / steps
    dim = h.dim
    psis = np.empty((steps + 1, dim), dtype=complex)
    psis[0] = psi0.amplitudes

    if h.generator_is_constant:
        step_u = expm_unitary_step(
            require_hermitian(h.generator(0.0), context="generator"), dt, h.hbar
        )
        for k in range(steps):
            psis[k + 1] = step_u @ psis[k]
    else:
        for k in range(steps):
            t_mid = times[k] + 0.5 * dt
            gen = require_hermitian(
                h.generator(float(t_mid)), context=f"generator(t={t_mid!r})"
            )
            psis[k + 1] = expm_unitary_step(gen, dt, h.hbar) @ psis[k]

    norms = np.linalg.norm(psis, axis=1)
    drift = np.abs(norms - 1.0)
    worst = int(np.argmax(drift))
    if drift[worst] > MAX_NORM_DRIFT:
        raise IntegrationError(
            f"norm drift {drift[worst]:.3e} at node {worst} exceeds {MAX_NORM_DRIFT:.1e}"
        )

    mean, disp = _node_statistics(h, psis, times)
    states = tuple(
        QuantumState.exact(psis[k], tol=MAX_NORM_DRIFT) for k in range(steps + 1)
    )
    return EvolutionTrace(times, states, mean, disp, hbar=h.hbar)


def short_time_coefficient(omega: float, omega0: float) -> float:
    """Quadratic growth rate of the driven dispersion at early times.

    a = (omega0^2 / 2) * (1 + 2*omega/omega0), in rad^2/s^2; the dispersion
    grows as eps*(1 + a*t^2) before O(t^4) corrections set in.
    """
    _check_positive(omega=omega, omega0=omega0)
    return 0.5 * omega0 * omega0 * (1.0 + 2.0 * omega / omega0)


def dispersion_driven_closed(
    epsilon: float,
    omega: float,
    omega0: float,
    t: float | np.ndarray,
    hbar: float = 1.0,
):
    """Laboratory-frame energy dispersion along the driven transfer curve.

    Exact for any detuning D = hbar*(omega - omega0):

        dE^2 = eps^2 + (hbar*w0)^2/4 - B^2,

    where B is the laboratory-frame mean energy along the curve,

        B = (hbar*w0/2) * [cos^2(kt/h) - ((4 eps^2 - D^2)/(4 k^2)) sin^2(kt/h)]
            - (eps^2/k) sin(2kt/h) sin(wt)
            + (2 eps^2/k) (D/(2k)) sin^2(kt/h) cos(wt),

    with k = kappa = sqrt(eps^2 + D^2/4).  Accepts scalar or array ``t``.
    """
    _check_positive(epsilon=epsilon, omega=omega, omega0=omega0, hbar=hbar)
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0.0):
        raise ValueError("t must be nonnegative")
    detuning = hbar * (omega - omega0)
    kappa = math.hypot(epsilon, 0.5 * detuning)
    x = kappa * t_arr / hbar
    sin_x, cos_x = np.sin(x), np.cos(x)
    s2, c2 = sin_x * sin_x, cos_x * cos_x
    e2 = epsilon * epsilon
    mean = (
        0.5 * hbar * omega0 * (c2 - ((4.0 * e2 - detuning * detuning) / (4.0 * kappa * kappa)) * s2)
        - (e2 / kappa) * np.sin(2.0 * x) * np.sin(omega * t_arr)
        + (2.0 * e2 / kappa) * (0.5 * detuning / kappa) * s2 * np.cos(omega * t_arr)
    )
    val = e2 + 0.25 * (hbar * omega0) ** 2 - mean * mean
    scale = e2 + 0.25 * (hbar * omega0) ** 2
    if np.any(val < -1e-10 * scale):
        raise FormulaError("closed-form dispersion went negative beyond round-off")
    out = np.sqrt(np.clip(val, 0.0, None))
    return float(out) if np.isscalar(t) or t_arr.ndim == 0 else out


def dispersion_driven_near_resonance(
    epsilon: float,
    omega: float,
    omega0: float,
    t: float | np.ndarray,
    hbar: float = 1.0,
):
    """Near-resonance (|detuning| << eps) limit of the driven dispersion.

        dE^2 = eps^2 + (hbar*w0)^2/4 * { 1 - [ cos(2 eps t / hbar)
               - (2 eps/(hbar w0)) sin(2 eps t / hbar) sin(w t) ]^2 }.

    Coincides exactly with :func:`dispersion_driven_closed` at zero detuning.
    """
    _check_positive(epsilon=epsilon, omega=omega, omega0=omega0, hbar=hbar)
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0.0):
        raise ValueError("t must be nonnegative")
    x = 2.0 * epsilon * t_arr / hbar
    bracket = np.cos(x) - (2.0 * epsilon / (hbar * omega0)) * np.sin(x) * np.sin(
        omega * t_arr
    )
    val = epsilon * epsilon + 0.25 * (hbar * omega0) ** 2 * (1.0 - bracket * bracket)
    scale = epsilon * epsilon + 0.25 * (hbar * omega0) ** 2
    if np.any(val < -1e-10 * scale):
        raise FormulaError("near-resonance dispersion went negative beyond round-off")
    out = np.sqrt(np.clip(val, 0.0, None))
    return float(out) if np.isscalar(t) or t_arr.ndim == 0 else out


def dispersion_short_time(
    epsilon: float, omega: float, omega0: float, t: float | np.ndarray
):
    """Quadratic short-time model eps*(1 + a*t^2) of the driven dispersion."""
    _check_positive(epsilon=epsilon)
    a = short_time_coefficient(omega, omega0)
    t_arr = np.asarray(t, dtype=float)
    out = epsilon * (1.0 + a * t_arr * t_arr)
    return float(out) if np.isscalar(t) or t_arr.ndim == 0 else out
