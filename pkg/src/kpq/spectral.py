"""Spectral radius via the norm-power limit, with C*-side oracles.

The A-side spectral radius is computed from ||a^{2^m}||_A^{1/2^m} by repeated
squaring with per-step renormalization (scale to unit norm, accumulate the
log-scale by compensated summation), then extrapolated from the tail of the
sequence.  The B-side oracle is the eigenvalue max-modulus for matrices and
the Fourier supremum for lattice sections; the radius-equality experiment
tabulates the gap between the two over random self-adjoint samples.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import ensembles
from .groups import ZdGroup
from .matrices import EigenDecomposition, MatrixError, as_matrix, hermitian_eig, max_abs, operator_norm
from .sections import WeightedSection, cstar_norm_abelian
from .seeding import sample_rng
from .zoo import AlgebraInstance, elem_is_zero, elem_scale, elem_square

M_MAX_LIMIT = 24


class SpectralError(ValueError):
    pass


@dataclass
class RadiusReport:
    sequence: list  # (n, ||a^n||_A^{1/n}) at n = 2^m
    extrapolated: float
    oracle: Optional[float]
    gap: Optional[float]
    meta: dict = field(default_factory=dict)


def default_tolerance(m_max: int) -> float:
    """Engineering tolerance schedule for the Gelfand gap, 10^-floor(m_max/5)."""
    return 10.0 ** (-(m_max // 5))


def gelfand_radius(x, inst: AlgebraInstance, m_max: int) -> RadiusReport:
    """Spectral radius in the instance norm by renormalized repeated squaring.

    The sequence entry at n = 2^m is exp(log||x||_A + sum_{i<=m} 2^-i log r_i)
    where r_i is the norm of the running square after the previous
    renormalization; the per-step logs are accumulated with math.fsum.
    """
    if m_max < 1 or m_max > M_MAX_LIMIT:
        raise SpectralError(f"m_max must be in 1..{M_MAX_LIMIT}")
    norm0 = inst.a_norm(x)
    oracle = b_radius_oracle(x, inst)
    if norm0 == 0.0:
        report = RadiusReport([(1, 0.0)], 0.0, oracle, abs(oracle) if oracle is not None else None)
        return report
    if not math.isfinite(norm0):
        raise SpectralError("element norm overflowed before squaring")

    b = elem_scale(inst, x, 1.0 / norm0)
    log_terms = [math.log(norm0)]
    weights = [1.0]
    sequence = []
    extrapolated = None
    for m in range(1, m_max + 1):
        b = elem_square(inst, b)
        rho = inst.a_norm(b)
        if rho == 0.0 or elem_is_zero(inst, b):
            sequence.append((2**m, 0.0))
            extrapolated = 0.0  # nilpotent: the true radius is exactly zero
            break
        if not math.isfinite(rho):
            raise SpectralError(f"norm overflow at squaring step {m} despite renormalization")
        log_terms.append(math.log(rho))
        weights.append(2.0**-m)
        val = math.exp(math.fsum(w * l for w, l in zip(weights, log_terms)))
        sequence.append((2**m, val))
        b = elem_scale(inst, b, 1.0 / rho)

    if extrapolated is None:
        extrapolated = _extrapolate(sequence)
    gap = abs(extrapolated - oracle) if oracle is not None else None
    return RadiusReport(
        sequence,
        extrapolated,
        oracle,
        gap,
        meta={"m_max": m_max, "extrapolation": "r + c*2^-m least squares on last 3 (heuristic)"},
    )


def _extrapolate(sequence) -> float:
    """Fit the last three samples as r + c 2^-m and return r (heuristic rate)."""
    tail = sequence[-3:]
    if len(tail) == 1:
        return tail[0][1]
    rows = np.array([[1.0, 1.0 / n] for n, _ in tail])
    vals = np.array([v for _, v in tail])
    coef, *_ = np.linalg.lstsq(rows, vals, rcond=None)
    return max(float(coef[0]), 0.0)


def b_radius_oracle(x, inst: AlgebraInstance) -> Optional[float]:
    """C*-side spectral radius when computable: eigenvalue max-modulus for
    normal matrices, Fourier supremum for lattice sections; None otherwise."""
    if inst.carrier == "matrix":
        x = as_matrix(x)
        try:
            spec = spectrum_b(x)
        except (MatrixError, SpectralError):
            return None
        return float(np.max(np.abs(spec))) if spec.size else 0.0
    if inst.carrier == "section" and isinstance(x.group, ZdGroup) and x.group.d <= 2:
        return cstar_norm_abelian(x)
    if inst.carrier == "trig":
        from .zoo import trig_sup_norm

        return trig_sup_norm(x)
    return None


def spectrum_b(a: np.ndarray) -> np.ndarray:
    """Spectrum of a normal matrix in the ambient operator algebra.

    Hermitian inputs go straight to the eigensolver (real output).  Normal
    inputs are jointly diagonalized through their commuting Hermitian parts:
    cluster the real-part eigenspaces, then diagonalize the imaginary part
    within each cluster.
    """
    a = as_matrix(a)
    herm_dev = max_abs(a - a.conj().T)
    scale = 1.0 + max_abs(a)
    if herm_dev <= 1e-12 * scale:
        return hermitian_eig(a).eigenvalues.astype(np.complex128)
    normal_dev = max_abs(a.conj().T @ a - a @ a.conj().T)
    if normal_dev > 1e-10 * scale**2:
        raise SpectralError(f"input is not normal (defect {normal_dev:.3e})")
    h = 0.5 * (a + a.conj().T)
    k = (a - a.conj().T) / 2j
    eig_h = hermitian_eig(h)
    basis = eig_h.vectors
    k_rot = basis.conj().T @ k @ basis
    vals = np.empty(a.shape[0], dtype=np.complex128)
    cluster_tol = 1e-8 * (1.0 + float(np.max(np.abs(eig_h.eigenvalues))))
    i = 0
    n = a.shape[0]
    while i < n:
        j = i + 1
        while j < n and eig_h.eigenvalues[j] - eig_h.eigenvalues[j - 1] <= cluster_tol:
            j += 1
        block = 0.5 * (k_rot[i:j, i:j] + k_rot[i:j, i:j].conj().T)
        sub = hermitian_eig(block)
        vals[i:j] = eig_h.eigenvalues[i:j] + 1j * sub.eigenvalues
        i = j
    return vals


def radius_equality_experiment(
    inst: AlgebraInstance,
    samples: int,
    seed: int,
    *,
    m_max: int = 14,
    support_radius: int = 4,
    size: int = 8,
    band_beta: Optional[float] = None,
    tolerance: Optional[float] = None,
) -> dict:
    """Gap statistics of the Gelfand radius against the C*-oracle over random
    self-adjoint elements; passes when the max gap meets the tolerance schedule."""
    if inst.b_norm is None and inst.carrier == "section" and not isinstance(inst.group, ZdGroup):
        raise SpectralError("instance has no computable B-side oracle")
    tol = default_tolerance(m_max) if tolerance is None else tolerance
    rows = []
    max_gap = 0.0
    for i in range(samples):
        rng = sample_rng(seed, i)
        x = _draw_self_adjoint(rng, inst, support_radius, size, band_beta)
        report = gelfand_radius(x, inst, m_max)
        gap = report.gap if report.gap is not None else math.inf
        max_gap = max(max_gap, gap)
        rows.append(
            {
                "sample": i,
                "extrapolated": report.extrapolated,
                "oracle": report.oracle,
                "gap": gap,
                "gelfand_tail": [v for _, v in report.sequence[-3:]],
            }
        )
    return {
        "instance": inst.name,
        "seed": seed,
        "m_max": m_max,
        "tolerance": tol,
        "samples": rows,
        "max_gap": max_gap,
        "pass": bool(max_gap <= tol),
    }


def _draw_self_adjoint(rng, inst: AlgebraInstance, support_radius: int, size: int, band_beta):
    if inst.carrier == "matrix":
        if band_beta is not None:
            return ensembles.banded_matrix(rng, size, band_beta, self_adjoint=True)
        return ensembles.gaussian_matrix(rng, size, self_adjoint=True)
    if inst.carrier == "section":
        return ensembles.section_sample(rng, inst.group, support_radius, self_adjoint=True)
    return ensembles.trig_sample(rng, support_radius, self_adjoint=True)
