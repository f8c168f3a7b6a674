"""Occupations and pairwise resources (concurrence, l1 coherence)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


PAIRS = ("12", "1d", "2d")
# axis of each mode after reshaping an 8x8 matrix to (nd, n2, n1, nd', n2', n1')
_AXIS = {"1": 2, "2": 1, "d": 0}
_SIGMA_YY = np.kron([[0, -1j], [1j, 0]], [[0, -1j], [1j, 0]])

STATE_TOL = 1e-8
SPECTRUM_FLOOR = -1e-6
PRODUCT_FLOOR = -1e-9
IMAG_RESIDUE = 1e-10
# eigenvalues of sigma below this are roundoff and treated as exact zeros
RANK_CUTOFF = 1e-14


def _pair_key(pair) -> str:
    if isinstance(pair, tuple):
        pair = "".join(str(x) for x in pair)
    if pair not in PAIRS:
        raise ValueError(f"unknown pair {pair!r}; expected one of {PAIRS}")
    return pair


def _matrix(rho):
    return getattr(rho, "coefficients", rho)


@dataclass(frozen=True)
class TwoBodyState:
    """4x4 marginal in the basis |00>, |01>, |10>, |11> of the kept modes."""

    entries: np.ndarray
    pair: str

    def __post_init__(self):
        object.__setattr__(self, "pair", _pair_key(self.pair))
        e = np.array(self.entries, dtype=complex)
        if e.shape != (4, 4):
            raise ValueError(f"two-body state must be 4x4, got {e.shape}")
        object.__setattr__(self, "entries", e)


def partial_trace_pair(rho, pair) -> TwoBodyState:
    """Marginal of modes ``pair`` obtained by summing over the third occupation."""
    pair = _pair_key(pair)
    a = np.asarray(_matrix(rho), dtype=complex).reshape(2, 2, 2, 2, 2, 2)
    keep = [_AXIS[m] for m in pair]
    (traced,) = {0, 1, 2} - set(keep)
    a = np.trace(a, axis1=traced, axis2=traced + 3)
    # remaining axes are in (nd, n2, n1) order minus the traced one
    remaining = [ax for ax in (0, 1, 2) if ax != traced]
    order = [remaining.index(k) for k in keep]
    a = a.transpose(order + [o + 2 for o in order])
    return TwoBodyState(a.reshape(4, 4), pair)


def occupations(rho):
    """``(<n1>, <n2>, <nd>)`` from the populations."""
    pops = np.real(np.diag(np.asarray(_matrix(rho)))).reshape(2, 2, 2)
    return (
        float(pops[:, :, 1].sum()),
        float(pops[:, 1, :].sum()),
        float(pops[1, :, :].sum()),
    )


def concurrence(sigma) -> float:
    """Two-qubit concurrence ``max(0, w1 - w2 - w3 - w4)``.

    The ``w_i`` are square roots of the eigenvalues of
    ``M = sigma (Y x Y) sigma^* (Y x Y)``.  For a positive semidefinite
    ``sigma = X X^dag`` they are the singular values of ``X^T (Y x Y) X``,
    which avoids the square root of eigenvalues that are zero up to
    roundoff.  Slightly indefinite inputs fall back to the eigenvalues of
    ``M`` itself.
    """
    s = np.asarray(getattr(sigma, "entries", sigma), dtype=complex)
    s = 0.5 * (s + s.conj().T)
    w, v = np.linalg.eigh(s)
    if w[0] < SPECTRUM_FLOOR:
        raise ValueError(f"state has eigenvalue {w[0]:.3e} below {SPECTRUM_FLOOR:.0e}")
    if w[0] >= -RANK_CUTOFF:
        keep = w > RANK_CUTOFF
        x = v[:, keep] * np.sqrt(w[keep])
        varpi = np.zeros(4)
        if x.shape[1]:
            sv = np.linalg.svd(x.T @ _SIGMA_YY @ x, compute_uv=False)
            varpi[: sv.size] = sv
    else:
        m = s @ _SIGMA_YY @ s.conj() @ _SIGMA_YY
        lam = np.linalg.eigvals(m)
        if np.max(np.abs(lam.imag)) > IMAG_RESIDUE:
            raise ArithmeticError(f"numerical degradation: complex eigenvalue {lam[np.argmax(np.abs(lam.imag))]:.3e}")
        lam = np.sort(lam.real)[::-1]
        if lam[-1] < PRODUCT_FLOOR:
            raise ArithmeticError(f"numerical degradation: product eigenvalue {lam[-1]:.3e}")
        varpi = np.sqrt(np.clip(lam, 0.0, None))
    return float(max(0.0, varpi[0] - varpi[1:].sum()))


def l1_coherence(sigma) -> float:
    s = np.asarray(getattr(sigma, "entries", sigma))
    return float(np.abs(s).sum() - np.abs(np.diag(s)).sum())


def pair_resources(rho):
    """``{pair: (concurrence, l1)}`` for the three two-body marginals."""
    out = {}
    for pair in PAIRS:
        sigma = partial_trace_pair(rho, pair)
        out[pair] = (concurrence(sigma), l1_coherence(sigma))
    return out
