"""Seeded random element ensembles for the experiment modules.

Three families: dense complex Gaussian matrices, banded matrices with
polynomial off-diagonal decay profiles, and group-algebra sections with
geometric coefficient decay on a bounded support.  All draws are made from a
caller-supplied numpy Generator so experiments replay bit-identically.
"""

from __future__ import annotations

import numpy as np

from .groups import GroupModel, enumerate_ball
from .sections import WeightedSection, add, scale, section_adjoint
from .zoo import TrigPolynomial


def gaussian_matrix(rng: np.random.Generator, size: int, self_adjoint: bool = False) -> np.ndarray:
    a = rng.standard_normal((size, size)) + 1j * rng.standard_normal((size, size))
    if self_adjoint:
        a = 0.5 * (a + a.conj().T)
    return a


def banded_matrix(
    rng: np.random.Generator, size: int, beta: float, self_adjoint: bool = False
) -> np.ndarray:
    """Dense Gaussian damped by (1 + |i-j|)^-beta."""
    idx = np.arange(size)
    profile = (1.0 + np.abs(idx[:, None] - idx[None, :])) ** (-beta)
    a = (rng.standard_normal((size, size)) + 1j * rng.standard_normal((size, size))) * profile
    if self_adjoint:
        a = 0.5 * (a + a.conj().T)
    return a


def section_sample(
    rng: np.random.Generator,
    group: GroupModel,
    support_radius: int,
    self_adjoint: bool = False,
    decay: float = 0.5,
) -> WeightedSection:
    """Gaussian coefficients scaled by decay^word_length over the radius-r ball."""
    table = enumerate_ball(group, support_radius)
    terms = {}
    for x in table.elements:
        scale_x = decay ** group.word_length(x)
        terms[x] = scale_x * complex(rng.standard_normal(), rng.standard_normal())
    f = WeightedSection(group, terms)
    if self_adjoint:
        f = scale(add(f, section_adjoint(f)), 0.5)
    return f


def sphere_section(
    rng: np.random.Generator, group: GroupModel, radius: int
) -> WeightedSection:
    """Gaussian coefficients on the sphere of the given radius."""
    table = enumerate_ball(group, radius)
    terms = {}
    for x in table.elements:
        if group.word_length(x) == radius:
            terms[x] = complex(rng.standard_normal(), rng.standard_normal())
    return WeightedSection(group, terms)


def trig_sample(rng: np.random.Generator, degree: int, self_adjoint: bool = False) -> TrigPolynomial:
    """Random trig polynomial of the given degree, coefficients damped by 1/(1+|n|)."""
    coeffs = {}
    for n in range(-degree, degree + 1):
        coeffs[n] = (rng.standard_normal() + 1j * rng.standard_normal()) / (1.0 + abs(n))
    f = TrigPolynomial.from_dict(coeffs)
    if self_adjoint:
        sym = f.conj_reflect().to_dict()
        merged = {n: 0.5 * (v + sym.get(n, 0.0)) for n, v in f.to_dict().items()}
        f = TrigPolynomial.from_dict(merged)
    return f
