"""Statevector machinery: amplitude encoding, the SWAP test and QRAM-style sampling.

The SWAP test is evolved gate by gate on the full ``2n + 1`` qubit register
(ancilla, then the two ``n`` qubit data registers): Hadamard on the ancilla,
one Fredkin gate per data-qubit pair, Hadamard again, and the ancilla's
marginal probability of reading 0. Batches of state pairs share one tensor.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

ENCODE_EPS = 1e-12
DEFAULT_SHOTS = 1024

# caps each (pairs, dim, dim) branch tensor at roughly 32 MB of float64
_MAX_BATCH_ELEMENTS = 1 << 22


class EncodingError(ValueError):
    """Raised for vectors that cannot be amplitude encoded (zero norm)."""


def n_qubits_for(dim: int) -> int:
    if dim < 1:
        raise EncodingError("cannot encode an empty vector")
    return int(dim - 1).bit_length()


@dataclass(frozen=True, eq=False)
class QuantumState:
    amplitudes: np.ndarray
    source_dim: int

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        size = amps.shape[0]
        if amps.ndim != 1 or size & (size - 1):
            raise ValueError(f"state length must be a power of two, got {amps.shape}")
        if not np.isclose(np.vdot(amps, amps).real, 1.0, rtol=0, atol=1e-9):
            raise ValueError("state is not normalised")
        if np.any(amps[self.source_dim:] != 0):
            raise ValueError("padding amplitudes must be zero")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def n_qubits(self) -> int:
        return n_qubits_for(self.amplitudes.shape[0])


@dataclass(frozen=True)
class FidelityEstimate:
    """Fidelity read off the ancilla; ``shots is None`` marks the exact result."""

    value: float
    raw_prob0: float
    shots: int | None = None

    @property
    def exact(self) -> bool:
        return self.shots is None


@dataclass(frozen=True, eq=False)
class BootstrapSample:
    indices: np.ndarray

    @property
    def M(self) -> int:
        return len(self.indices)


def amplitude_encode(x) -> QuantumState:
    """Normalise ``x`` and zero-pad it to the next power of two."""
    x = np.asarray(x, dtype=float).ravel()
    amps = encode_rows(x[None, :])[0]
    return QuantumState(amps.astype(complex), source_dim=x.shape[0])


def encode_rows(X) -> np.ndarray:
    """Amplitude-encode every row of ``X``; returns a real ``(N, 2**n)`` array."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise EncodingError(f"expected a 2-D array, got shape {X.shape}")
    norms = np.linalg.norm(X, axis=1)
    bad = np.flatnonzero(~(norms > ENCODE_EPS))
    if bad.size:
        raise EncodingError(f"row {int(bad[0])} has norm {norms[bad[0]]:.3g}; cannot amplitude encode")
    dim = 1 << n_qubits_for(X.shape[1])
    out = np.zeros((X.shape[0], dim))
    out[:, : X.shape[1]] = X / norms[:, None]
    return out


def _swap_test_p0(psi, phi) -> np.ndarray:
    """Ancilla Pr(0) for each row pair of ``psi`` and ``phi`` (shape ``(P, 2**n)``).

    The register is held as two branches, the data-register amplitudes with the
    ancilla at 0 and at 1. Each branch has axes (pair, psi qubits, phi qubits).
    """
    pairs, dim = psi.shape
    n = n_qubits_for(dim)
    qubits = (2,) * n
    product = (psi[:, :, None] * phi[:, None, :]).reshape((pairs,) + qubits + qubits)
    # |0>|psi>|phi> after the first Hadamard: both branches hold the product
    zero = product / np.sqrt(2.0)
    one = zero
    for q in range(n):
        # Fredkin(ancilla, psi_q, phi_q) permutes only the ancilla-1 branch
        one = np.swapaxes(one, 1 + q, 1 + n + q)
    # second Hadamard; only the ancilla-0 branch is needed for Pr(0)
    zero = ((zero + one) / np.sqrt(2.0)).reshape(pairs, -1)
    if np.iscomplexobj(zero):
        return np.einsum("pi,pi->p", zero.conj(), zero).real
    return np.einsum("pi,pi->p", zero, zero)


def swap_test_probabilities(psi, phi) -> np.ndarray:
    """Batched exact ancilla Pr(0), chunked to bound memory."""
    psi = np.atleast_2d(psi)
    phi = np.atleast_2d(phi)
    if psi.shape != phi.shape:
        raise ValueError(f"register size mismatch: {psi.shape} vs {phi.shape}")
    pairs, dim = psi.shape
    chunk = max(1, _MAX_BATCH_ELEMENTS // (dim * dim))
    out = np.empty(pairs)
    for start in range(0, pairs, chunk):
        stop = start + chunk
        out[start:stop] = _swap_test_p0(psi[start:stop], phi[start:stop])
    return out


def _check_pair(psi: QuantumState, phi: QuantumState):
    if psi.amplitudes.shape != phi.amplitudes.shape:
        raise ValueError(f"register size mismatch: {psi.n_qubits} vs {phi.n_qubits} qubits")


def swap_test_exact(psi: QuantumState, phi: QuantumState) -> FidelityEstimate:
    _check_pair(psi, phi)
    p0 = float(swap_test_probabilities(psi.amplitudes[None, :], phi.amplitudes[None, :])[0])
    return FidelityEstimate(value=min(max(2.0 * p0 - 1.0, 0.0), 1.0), raw_prob0=p0)


def sample_fidelity(p0, shots: int, rng) -> np.ndarray:
    """Estimate fidelities from ``shots`` ancilla measurements per pair."""
    if shots < 1:
        raise ValueError("shots must be >= 1")
    rng = np.random.default_rng(rng)
    p0 = np.clip(np.asarray(p0, dtype=float), 0.0, 1.0)
    zeros = rng.binomial(shots, p0)
    return np.clip(2.0 * zeros / shots - 1.0, 0.0, 1.0)


def swap_test_sampled(psi: QuantumState, phi: QuantumState, shots: int, rng=None) -> FidelityEstimate:
    if shots < 1:
        raise ValueError("shots must be >= 1")
    _check_pair(psi, phi)
    rng = np.random.default_rng(rng)
    p0 = swap_test_probabilities(psi.amplitudes[None, :], phi.amplitudes[None, :])[0]
    zeros = int(rng.binomial(shots, min(max(p0, 0.0), 1.0)))
    value = min(max(2.0 * zeros / shots - 1.0, 0.0), 1.0)
    return FidelityEstimate(value=value, raw_prob0=zeros / shots, shots=shots)


def fidelity_distance(x, c, shots: int | None = None, rng=None) -> float:
    """``1 - |<x|c>|^2`` on amplitude-encoded inputs; ``shots=None`` is exact."""
    psi, phi = amplitude_encode(x), amplitude_encode(c)
    if shots is None:
        est = swap_test_exact(psi, phi)
    else:
        est = swap_test_sampled(psi, phi, shots, rng)
    return 1.0 - est.value


def fidelity_distance_matrix(X, C, shots: int | None = None, rng=None, *, zero_centroid_distance=1.0):
    """Pairwise fidelity distances between rows of ``X`` and rows of ``C``.

    Rows of ``X`` must be encodable. A zero-norm centroid (the mean of points
    that cancel out) has no quantum state; it is reported at
    ``zero_centroid_distance`` from everything.
    """
    X = np.asarray(X, dtype=float)
    C = np.asarray(C, dtype=float)
    enc_x = encode_rows(X)
    live = np.linalg.norm(C, axis=1) > ENCODE_EPS
    D = np.full((X.shape[0], C.shape[0]), float(zero_centroid_distance))
    if live.any():
        enc_c = encode_rows(C[live])
        n, m = enc_x.shape[0], enc_c.shape[0]
        psi = np.repeat(enc_x, m, axis=0)
        phi = np.tile(enc_c, (n, 1))
        p0 = swap_test_probabilities(psi, phi)
        if shots is None:
            fid = np.clip(2.0 * p0 - 1.0, 0.0, 1.0)
        else:
            fid = sample_fidelity(p0, shots, rng)
        D[:, live] = 1.0 - fid.reshape(n, m)
    return D


def qram_bootstrap(N: int, M: int, rng=None) -> BootstrapSample:
    """Measure ``M`` copies of the uniform superposition over ``N`` memory cells.

    Each measurement returns one index uniformly at random, so this is ``M``
    i.i.d. draws with replacement.
    """
    if N < 1:
        raise ValueError("QRAM is empty (N = 0)")
    if M < 1:
        raise ValueError("need M >= 1 samples")
    rng = np.random.default_rng(rng)
    return BootstrapSample(rng.integers(0, N, size=M))
