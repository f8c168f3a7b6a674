"""Time-nonlocal master equation for the dot + two-mode system.

The generator is

    d rho/dt = -i[H, rho] + [Lp(t) rho, d] + [Lm(t) rho, d^dag] + h.c.

with ``Lp(t) = sum_jl Gp_jl(t) <E_j|d^dag|E_l> |E_j><E_l|`` and ``Lm`` built
the same way from ``Gm`` and ``d``.  The memory integrals ``G`` carry the
whole time non-locality, so the state itself needs no history.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .bath import MINUS, PLUS, BathParams, MemoryCoefficients, correlation
from .fock import (
    DIM,
    ModelParams,
    OccupationState,
    Spectrum,
    build_hamiltonian,
    diagonalize,
    ladder_operator,
)

STATE_TOL = 1e-8
BREACH_TOL = 1e-6
POSITIVITY_ABORT = -1e-3
MAX_PHASE_PER_STEP = 0.5


class InvariantBreach(RuntimeError):
    """Raised when a trajectory loses trace, Hermiticity or positivity."""

    def __init__(self, t, what, value, trajectory=None):
        super().__init__(f"{what} = {value:.3e} at t = {t:.6g}")
        self.t = t
        self.what = what
        self.value = value
        self.trajectory = trajectory


class StepTooCoarse(ValueError):
    pass


@dataclass(frozen=True)
class DensityMatrix:
    """Coefficients ``A[k, m] = <k|rho|m>`` in the occupation index basis."""

    coefficients: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        a = np.array(self.coefficients, dtype=complex)
        if a.shape != (DIM, DIM):
            raise ValueError(f"density matrix must be {DIM}x{DIM}, got {a.shape}")
        a.setflags(write=False)
        object.__setattr__(self, "coefficients", a)

    @classmethod
    def pure(cls, psi, t: float = 0.0) -> "DensityMatrix":
        psi = np.asarray(psi, dtype=complex)
        psi = psi / np.linalg.norm(psi)
        return cls(np.outer(psi, psi.conj()), t)

    @classmethod
    def basis_state(cls, n1, n2, nd) -> "DensityMatrix":
        a = np.zeros((DIM, DIM), dtype=complex)
        i = OccupationState(n1, n2, nd).index
        a[i, i] = 1.0
        return cls(a)

    def trace_error(self) -> float:
        return abs(np.trace(self.coefficients) - 1.0)

    def hermiticity_error(self) -> float:
        a = self.coefficients
        return float(np.max(np.abs(a - a.conj().T)))

    def min_eigenvalue(self) -> float:
        a = self.coefficients
        return float(np.linalg.eigvalsh(0.5 * (a + a.conj().T))[0])

    def validate(self, tol: float = STATE_TOL) -> None:
        for what, err in (("trace error", self.trace_error()), ("hermiticity error", self.hermiticity_error())):
            if err > tol:
                raise ValueError(f"invalid density matrix: {what} {err:.3e} > {tol:.0e}")
        if np.any(np.diag(self.coefficients).real < -tol):
            raise ValueError("invalid density matrix: negative population")


@dataclass(frozen=True)
class JumpMatrices:
    d_dag_eig: np.ndarray
    d_eig: np.ndarray
    basis_overlap: np.ndarray


def jump_matrices(spectrum: Spectrum) -> JumpMatrices:
    u = np.ascontiguousarray(spectrum.vectors, dtype=complex)
    dd = u.conj().T @ ladder_operator("d", True) @ u
    return JumpMatrices(dd, dd.conj().T.copy(), u)


def jump_matrix_from_overlaps(spectrum: Spectrum) -> np.ndarray:
    """``<E_j|d^dag|E_l>`` summed over occupations, with the (-1)^(k1+k2) sign."""
    u = spectrum.vectors
    out = np.zeros((DIM, DIM), dtype=complex)
    for k1 in (0, 1):
        for k2 in (0, 1):
            up = OccupationState(k1, k2, 1).index
            down = OccupationState(k1, k2, 0).index
            out += (-1) ** (k1 + k2) * np.outer(u[up, :].conj(), u[down, :])
    return out


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    trace_error: np.ndarray
    hermiticity_error: np.ndarray
    min_eigenvalue: np.ndarray
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.times)

    def state(self, i) -> DensityMatrix:
        return DensityMatrix(self.states[i], float(self.times[i]))

    def __iter__(self):
        return (self.state(i) for i in range(len(self)))


def _check_sync(t, mc: MemoryCoefficients):
    if abs(mc.t - t) > 1e-12:
        raise ValueError(f"memory desync: coefficients at t={mc.t}, state at t={t}")


def _coerce(rho):
    return rho.coefficients if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)


def master_rhs(t, rho, mc: MemoryCoefficients, jm: JumpMatrices, p: ModelParams) -> np.ndarray:
    """Time derivative of ``rho`` (occupation basis), operator form."""
    _check_sync(t, mc)
    a = _coerce(rho)
    u = jm.basis_overlap
    h = build_hamiltonian(p)
    d = ladder_operator("d", False)
    lp = u @ (mc.g_plus * jm.d_dag_eig) @ u.conj().T
    lm = u @ (mc.g_minus * jm.d_eig) @ u.conj().T
    x = lp @ a
    y = lm @ a
    diss = x @ d - d @ x + y @ d.conj().T - d.conj().T @ y
    return -1j * (h @ a - a @ h) + diss + diss.conj().T


def _occ(idx, bit):
    return (idx >> bit) & 1


def master_rhs_coefficients(t, rho, mc: MemoryCoefficients, jm: JumpMatrices, p: ModelParams) -> np.ndarray:
    """Same derivative as :func:`master_rhs`, assembled coefficient by coefficient.

    Slow reference implementation: each ``dA[l, n]/dt`` is built from the
    closed-form matrix elements of the number, hopping and pairing terms and
    from the projected dissipators, without forming any operator products.
    """
    _check_sync(t, mc)
    a = _coerce(rho)
    u = jm.basis_overlap
    eps = (p.eps1, p.eps2, p.eps_d)

    def c_coef(x, y, j):
        if x == j and y == 1 - j:
            return (-1) ** x * math.sqrt((x + 1 - j) * (y + j))
        return 0.0

    def ct_coef(x, y, j):
        if x == 1 - j and y == 1 - j:
            return (-1) ** x * math.sqrt((x + j) * (y + j))
        return 0.0

    def coeff(occ3):
        n1, n2, nd = occ3
        if not all(v in (0, 1) for v in occ3):
            return None
        return n1 + 2 * n2 + 4 * nd

    def A(k3, m3):
        ki, mi = coeff(k3), coeff(m3)
        if ki is None or mi is None:
            return 0.0
        return a[ki, mi]

    # Y[j, l][ell, n] = sum_k <ell|E_j><E_l|k> A[k, n]
    y = np.einsum("aj,bl,bn->jlan", u, u.conj(), a)

    def Y(j, l, ell3, n3):
        ei, ni = coeff(ell3), coeff(n3)
        if ei is None or ni is None:
            return 0.0
        return y[j, l, ei, ni]

    lp = mc.g_plus * jm.d_dag_eig
    lm = mc.g_minus * jm.d_eig
    comm_part = np.zeros((DIM, DIM), dtype=complex)
    diss_part = np.zeros((DIM, DIM), dtype=complex)
    for li in range(DIM):
        l1, l2, ld = (_occ(li, b) for b in range(3))
        for ni in range(DIM):
            n1, n2, nd = (_occ(ni, b) for b in range(3))
            ell, n = (l1, l2, ld), (n1, n2, nd)
            comm = sum(e * (lv - nv) for e, lv, nv in zip(eps, ell, n)) * a[li, ni]
            for j in (0, 1):
                s = (-1) ** j
                comm += p.lambda1 * s * (
                    (-1) ** l2 * c_coef(l1, ld, j) * A((l1 - 2 * j + 1, l2, ld + 2 * j - 1), n)
                    - (-1) ** n2 * c_coef(n1, nd, j) * A(ell, (n1 - 2 * j + 1, n2, nd + 2 * j - 1))
                )
                comm += p.lambda_t1 * s * (
                    (-1) ** l2 * ct_coef(l1, ld, j) * A((l1 + 2 * j - 1, l2, ld + 2 * j - 1), n)
                    - (-1) ** n2 * ct_coef(n1, nd, j) * A(ell, (n1 + 2 * j - 1, n2, nd + 2 * j - 1))
                )
                comm += p.lambda2 * s * (
                    c_coef(l2, ld, j) * A((l1, l2 - 2 * j + 1, ld + 2 * j - 1), n)
                    - c_coef(n2, nd, j) * A(ell, (n1, n2 - 2 * j + 1, nd + 2 * j - 1))
                )
                comm += p.lambda_t2 * s * (
                    ct_coef(l2, ld, j) * A((l1, l2 + 2 * j - 1, ld + 2 * j - 1), n)
                    - ct_coef(n2, nd, j) * A(ell, (n1, n2 + 2 * j - 1, nd + 2 * j - 1))
                )
            diss = 0j
            for j in range(DIM):
                for l in range(DIM):
                    if lp[j, l] != 0:
                        term = 0j
                        if nd == 1:
                            term += (-1) ** (n1 + n2) * Y(j, l, ell, (n1, n2, 0))
                        if ld == 0:
                            term -= (-1) ** (l1 + l2) * Y(j, l, (l1, l2, 1), n)
                        diss += lp[j, l] * term
                    if lm[j, l] != 0:
                        term = 0j
                        if nd == 0:
                            term += (-1) ** (n1 + n2) * Y(j, l, ell, (n1, n2, 1))
                        if ld == 1:
                            term -= (-1) ** (l1 + l2) * Y(j, l, (l1, l2, 0), n)
                        diss += lm[j, l] * term
            comm_part[li, ni] = comm
            diss_part[li, ni] = diss
    # only the dissipator receives the "+ h.c."
    return -1j * comm_part + diss_part + diss_part.conj().T


def _sample_correlations(b: BathParams, du: float, n: int):
    if b.gamma == 0.0:
        z = np.zeros(n, dtype=complex)
        return z, z.copy()
    u = du * np.arange(n)
    return (
        np.ascontiguousarray(correlation(PLUS, u, b), dtype=complex),
        np.ascontiguousarray(correlation(MINUS, u, b), dtype=complex),
    )


def evolve(
    rho0,
    p: ModelParams,
    b: BathParams,
    horizon: float,
    step: float,
    sample_every: int = 1,
    spectrum: Spectrum | None = None,
    memory_panels: int = 1,
) -> Trajectory:
    """Fixed-step RK4 integration of the master equation from ``t = 0``.

    The memory integrals are extended by ``memory_panels`` Simpson panels on
    each half step, so the RK4 stages at ``t``, ``t + h/2`` and ``t + h`` all
    see quadrature values rather than interpolants.  States are recorded at
    ``t = 0`` and every ``sample_every`` steps (plus the final step).

    Raises ``StepTooCoarse`` if ``step`` does not resolve the cutoff and
    Bohr frequencies, and ``InvariantBreach`` (carrying the partial
    trajectory) if trace or Hermiticity drift beyond 1e-6 or the smallest
    eigenvalue drops below -1e-3.
    """
    rho0 = rho0 if isinstance(rho0, DensityMatrix) else DensityMatrix(rho0)
    rho0.validate(tol=1e-12)
    if not (step > 0 and horizon > 0):
        raise ValueError("step and horizon must be positive")
    if sample_every < 1 or memory_panels < 1:
        raise ValueError("sample_every and memory_panels must be >= 1")
    if spectrum is None:
        spectrum = diagonalize(build_hamiltonian(p))
    omega = np.ascontiguousarray(spectrum.bohr_frequencies())
    fastest = max(float(np.max(np.abs(omega))), b.omega_c)
    if step * fastest > MAX_PHASE_PER_STEP:
        raise StepTooCoarse(
            f"step too coarse: h * {fastest:.4g} = {step * fastest:.3g} > {MAX_PHASE_PER_STEP}"
        )
    nsteps = int(math.ceil(horizon / step - 1e-9))
    per_step = 4 * memory_panels
    du = step / per_step
    ap, am = _sample_correlations(b, du, nsteps * per_step + 1)

    jm = jump_matrices(spectrum)
    u = jm.basis_overlap
    d = np.ascontiguousarray(jm.d_dag_eig)
    dh = np.ascontiguousarray(jm.d_eig)
    rho = np.ascontiguousarray(u.conj().T @ rho0.coefficients @ u)
    gp = np.zeros((DIM, DIM), dtype=complex)
    gm = np.zeros((DIM, DIM), dtype=complex)

    times, states, tr_err, h_err, min_eig = [], [], [], [], []

    def record(n):
        t = n * step
        a = u @ rho @ u.conj().T
        dm = DensityMatrix(a, t)
        times.append(t)
        states.append(dm.coefficients)
        tr_err.append(dm.trace_error())
        h_err.append(dm.hermiticity_error())
        min_eig.append(dm.min_eigenvalue())
        for what, value, bad in (
            ("trace error", tr_err[-1], tr_err[-1] > BREACH_TOL),
            ("hermiticity error", h_err[-1], h_err[-1] > BREACH_TOL),
            ("minimum eigenvalue", min_eig[-1], min_eig[-1] < POSITIVITY_ABORT),
        ):
            if bad:
                raise InvariantBreach(t, what, value, trajectory=build())

    def build():
        return Trajectory(
            np.array(times),
            np.array(states),
            np.array(tr_err),
            np.array(h_err),
            np.array(min_eig),
            meta={"step": step, "sample_every": sample_every, "memory_panels": memory_panels},
        )

    record(0)
    done = 0
    while done < nsteps:
        chunk = min(sample_every, nsteps - done)
        _kernels.rk4_steps(rho, gp, gm, omega, d, dh, ap, am, done * per_step, chunk, du, memory_panels)
        done += chunk
        record(done)
    return build()
