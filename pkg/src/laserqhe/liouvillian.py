"""Rotating-frame master equation of the four-level engine and its steady state.

Basis order is (|g>, |0>, |1>, |2>). Two independent routes to the steady
state are provided:

* :func:`solve_steady_reduced` solves the nine real linear equations obtained
  from the hand-written equations of motion for the tracked matrix elements.
* :func:`solve_steady_full` assembles the full Liouvillian from the jump
  operators by Kronecker algebra and solves for its null vector.

:func:`evolve` integrates the master equation in time and is only meant for
checking that the steady state attracts.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import DegenerateSteadyStateError, SolverError, StepSizeError
from .params import EngineParams

__all__ = [
    "G",
    "E0",
    "E1",
    "E2",
    "DIM",
    "SteadyStateSolution",
    "Trajectory",
    "jump_operators",
    "drive_hamiltonian",
    "master_rhs",
    "tracked_rhs",
    "reduced_system",
    "solve_steady_reduced",
    "full_liouvillian",
    "complex_liouvillian",
    "hermitian_basis",
    "to_real",
    "from_real",
    "solve_steady_full",
    "evolve",
    "density_matrix_violations",
    "maximally_mixed",
]

G, E0, E1, E2 = 0, 1, 2, 3
DIM = 4

MAX_CONDITION = 1e14
# Relative size of the second-smallest singular value below which the
# Liouvillian is treated as having several stationary states.
DEGENERACY_RTOL = 1e-12


def _ketbra(i, j):
    op = np.zeros((DIM, DIM), dtype=complex)
    op[i, j] = 1.0
    return op


def jump_operators():
    """Return ``(A_c, A_1, A_2)``: |g><0|, |g><1| and |g><2|."""
    return _ketbra(G, E0), _ketbra(G, E1), _ketbra(G, E2)


def drive_hamiltonian(lam: float) -> np.ndarray:
    """Rotating-frame drive coupling |0> to both degenerate upper levels."""
    v = lam * (_ketbra(E1, E0) + _ketbra(E2, E0))
    return v + v.conj().T


def _dissipator(a, b, rho):
    # a rho b^dag - {b^dag a, rho}/2; a == b gives the usual Lindblad term
    bd = b.conj().T
    bda = bd @ a
    return a @ rho @ bd - 0.5 * (bda @ rho + rho @ bda)


def _channels(params: EngineParams):
    """(rate, a, b) triples for every dissipator term of both baths."""
    occ = params.occupations()
    n_c, n_h = occ.n_c, occ.n_h
    a_c, a_1, a_2 = jump_operators()
    gc, gh = params.gamma_c, params.gamma_h
    cross = gh * params.p
    out = [
        (gc * (n_c + 1), a_c, a_c),
        (gc * n_c, a_c.conj().T, a_c.conj().T),
    ]
    for a in (a_1, a_2):
        out.append((gh * (n_h + 1), a, a))
        out.append((gh * n_h, a.conj().T, a.conj().T))
    for a, b in ((a_1, a_2), (a_2, a_1)):
        out.append((cross * (n_h + 1), a, b))
        out.append((cross * n_h, a.conj().T, b.conj().T))
    return out


def master_rhs(params: EngineParams, rho: np.ndarray) -> np.ndarray:
    """Right-hand side -i[V_R, rho] + L_h[rho] + L_c[rho] in operator form."""
    rho = np.asarray(rho, dtype=complex)
    v = drive_hamiltonian(params.lam)
    out = -1j * (v @ rho - rho @ v)
    for rate, a, b in _channels(params):
        if rate:
            out = out + rate * _dissipator(a, b, rho)
    return out


def tracked_rhs(params: EngineParams, rho: np.ndarray) -> np.ndarray:
    """Hand-written equations of motion for the tracked elements.

    Returns the time derivatives of (rho_11, rho_22, rho_00, rho_12, rho_10,
    rho_20) as a complex array. ``rho_gg`` is read from ``rho``.
    """
    occ = params.occupations()
    n_c, n_h = occ.n_c, occ.n_h
    lam, p, gc, gh = params.lam, params.p, params.gamma_c, params.gamma_h
    r = np.asarray(rho, dtype=complex)
    r11, r22, r00, rgg = r[E1, E1], r[E2, E2], r[E0, E0], r[G, G]
    r12, r21 = r[E1, E2], r[E2, E1]
    r10, r01 = r[E1, E0], r[E0, E1]
    r20, r02 = r[E2, E0], r[E0, E2]
    hot_out = gh * (n_h + 1)
    cold_out = gc * (n_c + 1)

    d11 = 1j * lam * (r10 - r01) - gh * ((n_h + 1) * r11 - n_h * rgg) - 0.5 * p * hot_out * (r12 + r21)
    d22 = 1j * lam * (r20 - r02) - gh * ((n_h + 1) * r22 - n_h * rgg) - 0.5 * p * hot_out * (r12 + r21)
    d00 = 1j * lam * (r01 + r02 - r10 - r20) - gc * ((n_c + 1) * r00 - n_c * rgg)
    d12 = (
        1j * lam * (r10 - r02)
        - hot_out * r12
        - 0.5 * p * gh * ((n_h + 1) * r11 + (n_h + 1) * r22 - 2 * n_h * rgg)
    )
    d10 = 1j * lam * (r11 - r00 + r12) - 0.5 * (cold_out + hot_out) * r10 - 0.5 * p * hot_out * r20
    d20 = 1j * lam * (r22 - r00 + r21) - 0.5 * (cold_out + hot_out) * r20 - 0.5 * p * hot_out * r10
    return np.array([d11, d22, d00, d12, d10, d20])


# Unknowns of the reduced system, in order.
REDUCED_UNKNOWNS = (
    "rho_11", "rho_22", "rho_00",
    "re_rho_12", "im_rho_12",
    "re_rho_10", "im_rho_10",
    "re_rho_20", "im_rho_20",
)


def _reduced_to_rho(v):
    r11, r22, r00, a12, b12, a10, b10, a20, b20 = v
    rho = np.zeros((DIM, DIM), dtype=complex)
    rho[E1, E1], rho[E2, E2], rho[E0, E0] = r11, r22, r00
    rho[G, G] = 1.0 - r11 - r22 - r00
    rho[E1, E2] = a12 + 1j * b12
    rho[E1, E0] = a10 + 1j * b10
    rho[E2, E0] = a20 + 1j * b20
    for i, j in ((E1, E2), (E1, E0), (E2, E0)):
        rho[j, i] = np.conj(rho[i, j])
    return rho


def _reduced_rhs(params, v):
    d11, d22, d00, d12, d10, d20 = tracked_rhs(params, _reduced_to_rho(v))
    return np.array([
        d11.real, d22.real, d00.real,
        d12.real, d12.imag,
        d10.real, d10.imag,
        d20.real, d20.imag,
    ])


def reduced_system(params: EngineParams):
    """Linear system ``A v = b`` whose solution is the steady state.

    ``v`` holds the three upper populations and the real and imaginary parts
    of rho_12, rho_10, rho_20 (see ``REDUCED_UNKNOWNS``); rho_gg is
    eliminated through the trace. The equations are affine in ``v``, so the
    matrix is read off column by column.
    """
    n = len(REDUCED_UNKNOWNS)
    offset = _reduced_rhs(params, np.zeros(n))
    a = np.empty((n, n))
    for k in range(n):
        e = np.zeros(n)
        e[k] = 1.0
        a[:, k] = _reduced_rhs(params, e) - offset
    return a, -offset


@dataclass(frozen=True)
class SteadyStateSolution:
    state: np.ndarray
    residual: float
    method: str

    @property
    def converged(self) -> bool:
        return self.residual <= 1e-10


def _residual(params, rho):
    return float(np.max(np.abs(master_rhs(params, rho))))


def _describe(params):
    return ", ".join(f"{k}={v!r}" for k, v in params.as_dict().items())


def solve_steady_reduced(params: EngineParams) -> SteadyStateSolution:
    a, b = reduced_system(params)
    cond = np.linalg.cond(a)
    if not np.isfinite(cond) or cond > MAX_CONDITION:
        raise SolverError(f"reduced system is singular (cond={cond:.3g}) at {_describe(params)}")
    v = np.linalg.solve(a, b)
    rho = _reduced_to_rho(v)
    return SteadyStateSolution(state=rho, residual=_residual(params, rho), method="reduced")


def hermitian_basis() -> np.ndarray:
    """Orthonormal Hermitian basis of 4x4 matrices, shape (16, 4, 4).

    The first four elements are the diagonal projectors, so the trace of
    ``sum(v_k B_k)`` is ``v[:4].sum()``.
    """
    basis = [_ketbra(i, i) for i in range(DIM)]
    s = 1.0 / np.sqrt(2.0)
    for i in range(DIM):
        for j in range(i + 1, DIM):
            basis.append(s * (_ketbra(i, j) + _ketbra(j, i)))
            basis.append(s * 1j * (_ketbra(i, j) - _ketbra(j, i)))
    return np.array(basis)


_BASIS = hermitian_basis()
_U = _BASIS.reshape(DIM * DIM, -1).T  # columns are row-major vec(B_k)


def to_real(rho: np.ndarray) -> np.ndarray:
    """Real coordinates Tr(B_k rho) of a Hermitian matrix."""
    return (_U.conj().T @ np.asarray(rho, dtype=complex).reshape(-1)).real


def from_real(v: np.ndarray) -> np.ndarray:
    return (_U @ np.asarray(v, dtype=complex)).reshape(DIM, DIM)


def complex_liouvillian(params: EngineParams) -> np.ndarray:
    """16x16 complex superoperator acting on row-major vec(rho)."""
    eye = np.eye(DIM)
    v = drive_hamiltonian(params.lam)
    sup = -1j * (np.kron(v, eye) - np.kron(eye, v.T))
    for rate, a, b in _channels(params):
        if not rate:
            continue
        bda = b.conj().T @ a
        sup = sup + rate * (
            np.kron(a, b.conj()) - 0.5 * (np.kron(bda, eye) + np.kron(eye, bda.T))
        )
    return sup


def full_liouvillian(params: EngineParams) -> np.ndarray:
    """Liouvillian in the real Hermitian basis: a real 16x16 matrix."""
    sup = _U.conj().T @ complex_liouvillian(params) @ _U
    # Lindblad generators preserve hermiticity, so sup is real up to rounding
    return sup.real


def solve_steady_full(params: EngineParams) -> SteadyStateSolution:
    """Null vector of the Liouvillian normalised to unit trace.

    The ``rho_gg`` row is replaced by the trace constraint before solving.
    """
    lv = full_liouvillian(params)
    sv = np.linalg.svd(lv, compute_uv=False)
    if sv[-2] <= DEGENERACY_RTOL * sv[0]:
        raise DegenerateSteadyStateError(
            f"Liouvillian has a multi-dimensional null space at {_describe(params)}"
        )
    a = lv.copy()
    a[0, :] = 0.0
    a[0, :DIM] = 1.0
    b = np.zeros(DIM * DIM)
    b[0] = 1.0
    cond = np.linalg.cond(a)
    if not np.isfinite(cond) or cond > MAX_CONDITION:
        raise SolverError(f"trace-augmented Liouvillian is singular (cond={cond:.3g}) at {_describe(params)}")
    rho = from_real(np.linalg.solve(a, b))
    return SteadyStateSolution(state=rho, residual=_residual(params, rho), method="full")


def density_matrix_violations(
    rho: np.ndarray, herm_tol: float = 1e-12, trace_tol: float = 1e-12, psd_tol: float = 1e-10
) -> list[str]:
    """List the density-matrix invariants that ``rho`` breaks."""
    rho = np.asarray(rho)
    problems = []
    if rho.shape != (DIM, DIM):
        return [f"shape {rho.shape} is not {(DIM, DIM)}"]
    herm = float(np.max(np.abs(rho - rho.conj().T)))
    if herm > herm_tol:
        problems.append(f"not Hermitian (defect {herm:.3g})")
    tr = abs(np.trace(rho) - 1.0)
    if tr > trace_tol:
        problems.append(f"trace differs from 1 by {tr:.3g}")
    lowest = float(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0])
    if lowest < -psd_tol:
        problems.append(f"negative eigenvalue {lowest:.3g}")
    return problems


def maximally_mixed() -> np.ndarray:
    return np.eye(DIM, dtype=complex) / DIM


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: np.ndarray  # shape (len(times), 4, 4)

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]


def evolve(
    params: EngineParams,
    rho0: np.ndarray,
    horizon: float,
    step: float,
    store_every: int = 1,
    tol: float = 1e-6,
) -> Trajectory:
    """Fixed-step classical RK4 integration of the master equation.

    Raises :class:`StepSizeError` if the trace or positivity drifts by more
    than ``tol``; a smaller ``step`` is then required.
    """
    if not step > 0:
        raise ValueError("step must be positive")
    if horizon < step:
        raise ValueError("horizon must be at least one step")
    bad = density_matrix_violations(rho0, herm_tol=1e-10, trace_tol=1e-10, psd_tol=1e-10)
    if bad:
        raise ValueError("initial state is not a density matrix: " + "; ".join(bad))

    lv = full_liouvillian(params)
    n_steps = int(round(horizon / step))
    # One RK4 step of a linear ODE is the degree-4 Taylor polynomial of exp(h L).
    hl = step * lv
    prop = np.eye(lv.shape[0])
    term = np.eye(lv.shape[0])
    for k in range(1, 5):
        term = term @ hl / k
        prop = prop + term

    v = to_real(rho0)
    times = [0.0]
    states = [from_real(v)]
    for i in range(1, n_steps + 1):
        v = prop @ v
        trace_err = abs(v[:DIM].sum() - 1.0)
        if trace_err > tol or not np.all(np.isfinite(v)):
            raise StepSizeError(f"trace drifted by {trace_err:.3g} at t={i * step:.6g}; reduce the step")
        if i % store_every == 0 or i == n_steps:
            rho = from_real(v)
            lowest = float(np.linalg.eigvalsh(rho)[0])
            if lowest < -tol:
                raise StepSizeError(
                    f"state lost positivity (eigenvalue {lowest:.3g}) at t={i * step:.6g}; reduce the step"
                )
            times.append(i * step)
            states.append(rho)
    return Trajectory(times=np.array(times), states=np.array(states))
