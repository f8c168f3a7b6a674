"""Three-mode fermionic Fock space: two orbitals f1, f2 and the dot d.

Basis states are stored at ``index = n1 + 2*n2 + 4*nd`` and defined as

    |n1, n2, nd> = (f1^dag)^n1 (f2^dag)^n2 (d^dag)^nd |vac>

so every fermionic sign follows from anticommuting an operator past the
creation operators standing to its left in that product.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

DIM = 8
MODES = ("f1", "f2", "d")
_BIT = {"f1": 0, "f2": 1, "d": 2}

# Basis ordering used for the parity-block form of H:
# {vac, f1+d+, f2+d+, f1+f2+ | d+, f1+, f2+, f1+f2+d+} applied to |vac>.
PARITY_ORDER = np.array([0, 5, 6, 3, 4, 1, 2, 7])

HERMITIAN_TOL = 1e-12
_TIE_TOL = 1e-12


@dataclass(frozen=True)
class OccupationState:
    n1: int
    n2: int
    nd: int

    def __post_init__(self):
        for n in (self.n1, self.n2, self.nd):
            if n not in (0, 1):
                raise ValueError(f"occupation numbers must be 0 or 1, got {n}")

    @property
    def index(self) -> int:
        return self.n1 + 2 * self.n2 + 4 * self.nd

    @classmethod
    def from_index(cls, index: int) -> "OccupationState":
        if not 0 <= index < DIM:
            raise ValueError(f"basis index out of range: {index}")
        return cls(index & 1, (index >> 1) & 1, (index >> 2) & 1)

    def occupation(self, mode: str) -> int:
        return (self.n1, self.n2, self.nd)[_BIT[mode]]

    @property
    def parity(self) -> str:
        return "even" if (self.n1 + self.n2 + self.nd) % 2 == 0 else "odd"


def basis_states():
    return [OccupationState.from_index(i) for i in range(DIM)]


def ket(n1: int, n2: int, nd: int) -> np.ndarray:
    v = np.zeros(DIM, dtype=complex)
    v[OccupationState(n1, n2, nd).index] = 1.0
    return v


def ladder_operator(mode: str, dagger: bool) -> np.ndarray:
    """Matrix of ``f1``, ``f2`` or ``d`` (or its adjoint) in the index basis."""
    if mode not in _BIT:
        raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}")
    bit = _BIT[mode]
    op = np.zeros((DIM, DIM), dtype=complex)
    for idx in range(DIM):
        occ = [(idx >> b) & 1 for b in range(3)]
        if occ[bit] == (1 if dagger else 0):
            continue
        sign = -1.0 if sum(occ[:bit]) % 2 else 1.0
        occ[bit] ^= 1
        op[occ[0] + 2 * occ[1] + 4 * occ[2], idx] = sign
    return op


def number_operator(mode: str) -> np.ndarray:
    c = ladder_operator(mode, False)
    return c.conj().T @ c


def total_number() -> np.ndarray:
    return sum(number_operator(m) for m in MODES)


def parity_operator() -> np.ndarray:
    return np.diag([(-1.0) ** bin(i).count("1") for i in range(DIM)]).astype(complex)


def parity_of_index(index: int) -> str:
    return "even" if bin(index).count("1") % 2 == 0 else "odd"


class Species(str, enum.Enum):
    MAJORANA = "majorana"
    REGULAR = "regular"
    CUSTOM = "custom"


@dataclass(frozen=True)
class ModelParams:
    """Parameters of the dot + two-mode Hamiltonian.

    ``lambda_t1``/``lambda_t2`` are the pairing (anomalous) couplings.  For
    ``Species.MAJORANA`` they default to ``lambda1``/``lambda2`` and for
    ``Species.REGULAR`` to zero; passing values inconsistent with the
    species raises ``ValueError``.
    """

    eps_d: float
    eps1: float
    eps2: float
    lambda1: float
    lambda2: float
    lambda_t1: float | None = None
    lambda_t2: float | None = None
    species: Species = Species.CUSTOM

    def __post_init__(self):
        species = Species(self.species)
        object.__setattr__(self, "species", species)
        forced = {
            Species.MAJORANA: (self.lambda1, self.lambda2),
            Species.REGULAR: (0.0, 0.0),
            Species.CUSTOM: (0.0, 0.0),
        }[species]
        for name, want in zip(("lambda_t1", "lambda_t2"), forced):
            got = getattr(self, name)
            if got is None:
                object.__setattr__(self, name, float(want))
            elif species is not Species.CUSTOM and got != want:
                raise ValueError(
                    f"{species.value} species requires {name}={want}, got {got}"
                )
        for name in ("eps_d", "eps1", "eps2", "lambda1", "lambda2", "lambda_t1", "lambda_t2"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value}")
            object.__setattr__(self, name, value)

    @classmethod
    def majorana(cls, eps_d, eps, lambda1, lambda2):
        return cls(eps_d, eps, eps, lambda1, lambda2, species=Species.MAJORANA)

    @classmethod
    def regular(cls, eps_d, eps, lambda1, lambda2):
        return cls(eps_d, eps, eps, lambda1, lambda2, species=Species.REGULAR)

    def with_species(self, species) -> "ModelParams":
        return ModelParams(
            self.eps_d, self.eps1, self.eps2, self.lambda1, self.lambda2, species=Species(species)
        )

    @property
    def eps_plus(self) -> float:
        return 0.5 * (self.eps1 + self.eps2)

    @property
    def eps_minus(self) -> float:
        return 0.5 * (self.eps1 - self.eps2)


def build_hamiltonian(p: ModelParams) -> np.ndarray:
    f1, f2, d = (ladder_operator(m, False) for m in MODES)
    f1d, f2d, dd = (c.conj().T for c in (f1, f2, d))
    eye = np.eye(DIM)
    h = p.eps_d * (dd @ d) + p.eps1 * (f1d @ f1 - 0.5 * eye) + p.eps2 * (f2d @ f2 - 0.5 * eye)
    coupling = (
        p.lambda1 * dd @ f1
        + p.lambda2 * dd @ f2
        + p.lambda_t1 * dd @ f1d
        + p.lambda_t2 * dd @ f2d
    )
    return h + coupling + coupling.conj().T


def parity_blocks(h: np.ndarray):
    """Return the even and odd 4x4 blocks of ``h`` in ``PARITY_ORDER``."""
    hp = h[np.ix_(PARITY_ORDER, PARITY_ORDER)]
    return hp[:4, :4], hp[4:, 4:]


@dataclass(frozen=True)
class Spectrum:
    """Eigenpairs sorted by energy; ``vectors[:, j]`` belongs to ``energies[j]``."""

    energies: np.ndarray
    vectors: np.ndarray
    parity_labels: tuple
    table_labels: tuple | None = field(default=None)

    def __post_init__(self):
        self.energies.setflags(write=False)
        self.vectors.setflags(write=False)

    def bohr_frequencies(self) -> np.ndarray:
        """``E_j - E_l`` as an 8x8 array."""
        return self.energies[:, None] - self.energies[None, :]


def _sorted_spectrum(energies, vectors, parities, table_labels=None) -> Spectrum:
    energies = np.asarray(energies, dtype=float)
    lead = [int(np.argmax(np.abs(vectors[:, j]) > 1e-9)) for j in range(len(energies))]
    order = sorted(range(len(energies)), key=lambda j: energies[j])
    # regroup numerical ties: even parity first, then leading basis index
    out, i = [], 0
    while i < len(order):
        k = i + 1
        while k < len(order) and energies[order[k]] - energies[order[i]] <= _TIE_TOL * max(
            1.0, abs(energies[order[i]])
        ):
            k += 1
        group = sorted(order[i:k], key=lambda j: (parities[j] != "even", lead[j]))
        out.extend(group)
        i = k
    labels = None if table_labels is None else tuple(table_labels[j] for j in out)
    return Spectrum(
        energies[out].copy(),
        np.ascontiguousarray(vectors[:, out]),
        tuple(parities[j] for j in out),
        labels,
    )


def check_hermitian(h: np.ndarray, tol: float = HERMITIAN_TOL) -> None:
    asym = float(np.max(np.abs(h - h.conj().T)))
    if asym > tol:
        raise ValueError(f"operator is not Hermitian: max asymmetry {asym:.3e} > {tol:.0e}")


def diagonalize(h: np.ndarray) -> Spectrum:
    """Numerical eigendecomposition, one parity sector at a time.

    Diagonalising the sectors separately keeps every eigenvector inside a
    single parity sector even when levels of opposite parity are degenerate.
    """
    h = np.asarray(h, dtype=complex)
    if h.shape != (DIM, DIM):
        raise ValueError(f"expected an {DIM}x{DIM} operator, got {h.shape}")
    check_hermitian(h)
    h = 0.5 * (h + h.conj().T)
    hp = h[np.ix_(PARITY_ORDER, PARITY_ORDER)]
    if np.max(np.abs(hp[:4, 4:])) == 0.0:
        energies, vectors, parities = [], np.zeros((DIM, DIM), dtype=complex), []
        for sector, sl in (("even", slice(0, 4)), ("odd", slice(4, 8))):
            w, v = np.linalg.eigh(hp[sl, sl])
            cols = slice(len(energies), len(energies) + 4)
            vectors[PARITY_ORDER[sl], cols] = v
            energies.extend(w)
            parities.extend([sector] * 4)
    else:
        energies, vectors = np.linalg.eigh(h)
        pe = np.abs(vectors[PARITY_ORDER[:4], :]) ** 2
        parities = ["even" if w >= 0.5 else "odd" for w in pe.sum(axis=0)]
    return _sorted_spectrum(energies, vectors, parities)


def analytic_spectrum(p: ModelParams) -> Spectrum:
    """Closed-form eigenpairs for equal orbital energies ``eps1 == eps2``.

    The eigenvector phases are those of the closed-form kets, so matrix
    elements such as ``<E_j|d^dag|E_l>`` come out with definite signs.
    ``table_labels`` records the 1-based row of each sorted eigenpair in the
    closed-form list.
    """
    if p.eps1 != p.eps2:
        raise ValueError("closed forms require eps1 == eps2; use diagonalize()")
    if p.species not in (Species.MAJORANA, Species.REGULAR):
        raise ValueError("closed forms exist only for majorana or regular species")
    eps, l1, l2 = p.eps1, p.lambda1, p.lambda2
    xi = {"+": 0.5 * (p.eps_d + eps), "-": 0.5 * (p.eps_d - eps)}
    delta = {mu: math.sqrt(xi[mu] ** 2 + l1**2 + l2**2) for mu in "+-"}

    def b(mu, nu):
        sgn = 1.0 if nu == "+" else -1.0
        norm2 = 2.0 * delta[mu] * (delta[mu] + sgn * xi[mu])
        if norm2 <= 1e-300:
            raise ValueError(
                f"degenerate normalization b_{mu}{nu}; closed form undefined, use diagonalize()"
            )
        return 1.0 / math.sqrt(norm2)

    def c(mu, nu):
        sgn = 1.0 if nu == "+" else -1.0
        return (xi[mu] + sgn * delta[mu]) * b(mu, nu)

    F1, F2, Dd = (ladder_operator(m, True) for m in MODES)
    vac = ket(0, 0, 0)
    pair = F1 @ F2
    if p.species is Species.MAJORANA:
        rows = [
            (b("+", "+") * (l2 * F2 + l1 * F1) @ Dd @ vac + c("+", "+") * vac, xi["-"] - delta["+"]),
            (b("-", "-") * (l1 * F1 + l2 * F2) @ vac + c("-", "-") * Dd @ vac, xi["-"] - delta["-"]),
            (b("+", "-") * (l1 * F2 - l2 * F1) @ vac + c("+", "-") * pair @ Dd @ vac, xi["+"] - delta["+"]),
            (b("-", "+") * (l1 * F2 - l2 * F1) @ Dd @ vac + c("-", "+") * pair @ vac, xi["+"] - delta["-"]),
            (b("-", "+") * (l2 * F2 + l1 * F1) @ vac + c("-", "+") * Dd @ vac, xi["-"] + delta["-"]),
            (b("+", "-") * (l1 * F1 + l2 * F2) @ Dd @ vac + c("+", "-") * vac, xi["-"] + delta["+"]),
            (b("-", "-") * (l2 * F1 - l1 * F2) @ Dd @ vac - c("-", "-") * pair @ vac, xi["+"] + delta["-"]),
            (b("+", "+") * (l1 * F2 - l2 * F1) @ vac + c("+", "+") * pair @ Dd @ vac, xi["+"] + delta["+"]),
        ]
    else:
        lam = math.hypot(l1, l2)
        if lam == 0.0:
            raise ValueError("closed forms need lambda1**2 + lambda2**2 > 0; use diagonalize()")
        rows = [
            (vac, -eps),
            ((l1 * F2 - l2 * F1) @ vac / lam, 0.0),
            ((l1 * F1 + l2 * F2) @ Dd @ vac / lam, p.eps_d),
            (pair @ Dd @ vac, p.eps_d + eps),
            (b("-", "-") * (l1 * F1 + l2 * F2) @ vac + c("-", "-") * Dd @ vac, xi["-"] - delta["-"]),
            (b("-", "+") * (l1 * F2 - l2 * F1) @ Dd @ vac + c("-", "+") * pair @ vac, xi["+"] - delta["-"]),
            (b("-", "+") * (l1 * F1 + l2 * F2) @ vac + c("-", "+") * Dd @ vac, xi["-"] + delta["-"]),
            (b("-", "-") * (l2 * F1 - l1 * F2) @ Dd @ vac - c("-", "-") * pair @ vac, xi["+"] + delta["-"]),
        ]
    vectors = np.column_stack([v for v, _ in rows])
    energies = [e for _, e in rows]
    parities = [parity_of_index(int(np.argmax(np.abs(vectors[:, j])))) for j in range(DIM)]
    return _sorted_spectrum(energies, vectors, parities, table_labels=range(1, DIM + 1))
