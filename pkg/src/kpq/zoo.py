"""Catalogue of concrete algebra instances: norms, power-inequality parameters,
and a string-addressable registry.

Each AlgebraInstance packages a Banach-*-algebra norm (the A-norm), the
ambient C*-norm evaluator used as oracle (the B-norm, absent for carriers
without a computable one), the declared power-inequality triple (k, p, q)
with p + q = k kept as exact fractions, and enough carrier metadata to
multiply, involve, and exponentiate elements generically.

Carriers: dense matrices (numpy arrays), weighted group sections, and
trigonometric polynomials on the circle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from . import sections as sec
from .groups import CyclicGroup, FreeGroup, GroupModel, HeisenbergGroup, ZdGroup, enumerate_ball
from .matrices import adjoint, as_matrix, mat_mul, operator_norm, schatten_norm
from .sections import (
    SectionError,
    Weight,
    WeightedSection,
    cstar_norm_abelian,
    convolve,
    section_adjoint,
    torus_sup,
    weight_from_name,
    weighted_lp_norm,
)

TRIG_SUP_GRID = 4096


class ZooError(ValueError):
    pass


# ------------------------------------------------------------------ triples


@dataclass(frozen=True)
class DiffTriple:
    """Exponent data (k, p, q) of a power inequality, with p + q = k exactly."""

    k: int
    p: Fraction
    q: Fraction
    c_estimate: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "p", Fraction(self.p))
        object.__setattr__(self, "q", Fraction(self.q))
        if self.k < 2 or int(self.k) != self.k:
            raise ZooError(f"k must be an integer >= 2, got {self.k}")
        if self.p <= 0 or self.q <= 0:
            raise ZooError("p and q must be positive")
        if self.p + self.q != self.k:
            raise ZooError(f"p + q must equal k exactly ({self.p} + {self.q} != {self.k})")

    def tau_bound(self) -> float:
        """log_k max(k-1, p): the growth exponent threshold for this triple."""
        return math.log(max(self.k - 1, float(self.p))) / math.log(self.k)

    def as_json(self) -> dict:
        return {
            "k": self.k,
            "p": [self.p.numerator, self.p.denominator],
            "q": [self.q.numerator, self.q.denominator],
            "c_estimate": self.c_estimate,
        }

    @staticmethod
    def from_json(obj: dict) -> "DiffTriple":
        return DiffTriple(
            int(obj["k"]),
            Fraction(obj["p"][0], obj["p"][1]),
            Fraction(obj["q"][0], obj["q"][1]),
            obj.get("c_estimate"),
        )


def _as_inverse_fraction(p) -> Fraction:
    """1/p as an exact fraction, with p = inf giving 0."""
    if p == math.inf or (isinstance(p, str) and p == "inf"):
        return Fraction(0)
    frac = Fraction(p) if not isinstance(p, float) else Fraction(p).limit_denominator(10**9)
    if frac < 1:
        raise ZooError(f"exponent p must satisfy 1 <= p <= inf, got {p}")
    return 1 / frac


def shin_sun_exponent(p, alpha) -> tuple[Fraction, DiffTriple]:
    """Interpolation exponent theta = (alpha + 1/p - 1)/(alpha + 1/p - 1/2) for the
    off-diagonal-decay matrix families, with its triple (2, 2 - theta, theta).

    Requires alpha > 1 - 1/p; returns exact fractions for rational inputs.
    """
    inv_p = _as_inverse_fraction(p)
    alpha_f = Fraction(alpha) if not isinstance(alpha, float) else Fraction(alpha).limit_denominator(10**9)
    if alpha_f <= 1 - inv_p:
        raise ZooError(f"need alpha > 1 - 1/p (alpha={alpha}, p={p})")
    theta = (alpha_f + inv_p - 1) / (alpha_f + inv_p - Fraction(1, 2))
    return theta, DiffTriple(2, 2 - theta, theta)


def fell_triple(p, group: GroupModel | None = None, weight: Weight | None = None) -> DiffTriple:
    """Triple (4, (4p+3)/(p+1), 1/(p+1)) for weighted l^1 convolution algebras
    whose weight satisfies nu^-1 in l^p.

    When a lattice group and weight are supplied, summability of nu^-p is
    checked numerically by a sphere-increment ratio test; a divergent weight
    raises.
    """
    p_f = Fraction(p) if not isinstance(p, float) else Fraction(p).limit_denominator(10**9)
    if p_f <= 0:
        raise ZooError(f"p must be positive, got {p}")
    if group is not None and weight is not None:
        if not _weight_inverse_summable(group, weight, float(p_f)):
            raise ZooError(f"nu^-p partial sums diverge for p={p}: not an l^p weight inverse")
    return DiffTriple(4, (4 * p_f + 3) / (p_f + 1), 1 / (p_f + 1))


def _sphere_inverse_mass(group: GroupModel, weight: Weight, p: float, radius: int) -> float:
    table = enumerate_ball(group, radius)
    mass = 0.0
    for x in table.elements:
        l = group.word_length(x)
        if l == radius:
            mass += float(weight.on_length(l)) ** (-p)
    return mass


def _weight_inverse_summable(group: GroupModel, weight: Weight, p: float, radius: int = 24) -> bool:
    """Ratio test on sphere increments: summable iff I(2R)/I(R) stays below 1/2."""
    i_r = _sphere_inverse_mass(group, weight, p, radius)
    i_2r = _sphere_inverse_mass(group, weight, p, 2 * radius)
    if i_r == 0.0:
        return True
    return i_2r / i_r < 0.5


# ----------------------------------------------------- off-diagonal decay norms


def _lp_of_vector(v: np.ndarray, p: float) -> float:
    if v.size == 0:
        return 0.0
    if math.isinf(p):
        return float(np.max(v))
    top = float(np.max(v))
    if top == 0.0:
        return 0.0
    return top * float(np.sum((v / top) ** p)) ** (1.0 / p)


def _check_p(p: float):
    if p < 1:
        raise ZooError(f"family exponent must be >= 1, got {p}")


def _offdiag_weights(n: int, alpha: float) -> np.ndarray:
    idx = np.arange(n)
    return (1.0 + np.abs(idx[:, None] - idx[None, :])) ** alpha


def groschur_norm(a: np.ndarray, p: float, alpha: float) -> float:
    """max of row-wise and column-wise weighted l^p norms (Schur-type norm).

    Indices are read as the finite window {0, ..., n-1} of the integer line;
    the weight is (1 + |i-j|)^alpha.  p = inf gives the Jaffard norm.
    """
    _check_p(p)
    a = as_matrix(a)
    weighted = np.abs(a) * _offdiag_weights(a.shape[0], alpha)
    if math.isinf(p):
        return float(np.max(weighted)) if weighted.size else 0.0
    rows = max(_lp_of_vector(weighted[i, :], p) for i in range(a.shape[0]))
    cols = max(_lp_of_vector(weighted[:, j], p) for j in range(a.shape[0]))
    return max(rows, cols)


def jaffard_norm(a: np.ndarray, alpha: float) -> float:
    return groschur_norm(a, math.inf, alpha)


def _diagonal_sups(a: np.ndarray, alpha: float) -> np.ndarray:
    """sup over each diagonal k = i - j of |a(i,j)| (1+|k|)^alpha, k = -(n-1)..n-1."""
    a = as_matrix(a)
    n = a.shape[0]
    mags = np.abs(a)
    sups = np.empty(2 * n - 1)
    for k in range(-(n - 1), n):
        diag = np.diagonal(mags, offset=-k)  # entries with i - j = k
        sups[k + n - 1] = float(np.max(diag)) * (1.0 + abs(k)) ** alpha
    return sups


def bgs_norm(a: np.ndarray, p: float, alpha: float) -> float:
    """l^p norm over diagonals of the weighted per-diagonal supremum."""
    _check_p(p)
    return _lp_of_vector(_diagonal_sups(a, alpha), p)


def beurling_norm(a: np.ndarray, p: float, alpha: float) -> float:
    """l^p norm over k of sup_{|i-j| >= |k|} |a(i,j)| (1+|i-j|)^alpha.

    The index k runs over the window's realized differences -(n-1)..n-1.
    """
    _check_p(p)
    a = as_matrix(a)
    n = a.shape[0]
    weighted_sups = np.empty(n)
    mags = np.abs(a)
    for d in range(n):
        diag = np.diagonal(mags, offset=d)
        hi = float(np.max(diag)) if diag.size else 0.0
        if d > 0:
            lo_diag = np.diagonal(mags, offset=-d)
            hi = max(hi, float(np.max(lo_diag)))
        weighted_sups[d] = hi * (1.0 + d) ** alpha
    tail_sups = np.maximum.accumulate(weighted_sups[::-1])[::-1]  # sup over |i-j| >= d
    terms = np.concatenate([tail_sups[1:][::-1], tail_sups])  # k = -(n-1)..n-1
    return _lp_of_vector(terms, p)


def gs_b_dominance(alpha: float) -> float:
    """Constant kappa with ||a||_op <= kappa * Jaffard norm (Schur test), alpha > 1."""
    if alpha <= 1:
        return math.inf
    # sum over Z of (1+|k|)^-alpha = 2*zeta-type tail + 1
    k = np.arange(1, 200000)
    partial = 1.0 + 2.0 * float(np.sum((1.0 + k) ** (-alpha)))
    tail = 2.0 * (200000.0 ** (1.0 - alpha)) / (alpha - 1.0)
    return partial + tail


# ------------------------------------------------------------------ trig carrier


@dataclass(frozen=True)
class TrigPolynomial:
    """Finitely supported Fourier coefficients on Z (a trig polynomial on the circle)."""

    coeffs: tuple

    @staticmethod
    def from_dict(coeffs: dict) -> "TrigPolynomial":
        items = tuple(sorted((int(n), complex(v)) for n, v in coeffs.items() if v != 0))
        return TrigPolynomial(items)

    def to_dict(self) -> dict:
        return {n: v for n, v in self.coeffs}

    def section(self) -> WeightedSection:
        return WeightedSection(ZdGroup(1), {(n,): v for n, v in self.coeffs})

    def derivative(self) -> "TrigPolynomial":
        return TrigPolynomial.from_dict({n: 1j * n * v for n, v in self.coeffs})

    def conj_reflect(self) -> "TrigPolynomial":
        """The adjoint in C(T): coefficients n -> conj(c_{-n})."""
        return TrigPolynomial.from_dict({-n: v.conjugate() for n, v in self.coeffs})

    def degree(self) -> int:
        return max((abs(n) for n, _ in self.coeffs), default=0)


def trig_mul(f: TrigPolynomial, g: TrigPolynomial) -> TrigPolynomial:
    """Pointwise product on the circle = coefficient convolution."""
    out: dict = {}
    for n, v in f.coeffs:
        for m, w in g.coeffs:
            out[n + m] = out.get(n + m, 0.0) + v * w
    return TrigPolynomial.from_dict(out)


def trig_sup_norm(f: TrigPolynomial, grid: int = TRIG_SUP_GRID) -> float:
    if not f.coeffs:
        return 0.0
    return torus_sup(f.section(), grid)


def deriv_domain_norm(f: TrigPolynomial) -> float:
    """sup |f| + sup |f'| on the circle; the derivative acts as c_n -> i n c_n."""
    return trig_sup_norm(f) + trig_sup_norm(f.derivative())


# ------------------------------------------------------------------ Hilbert algebra


def left_convolution_matrix(f: WeightedSection) -> np.ndarray:
    """Matrix of left convolution by f on l^2 of a finite group (counting measure)."""
    group = f.group
    if not isinstance(group, CyclicGroup):
        raise ZooError("left-convolution matrices are built for finite (cyclic) models")
    table = enumerate_ball(group, group.n)
    n = table.size
    mat = np.zeros((n, n), dtype=np.complex128)
    for j, z in enumerate(table.elements):
        for y, fy in f.terms.items():
            mat[table.index[group.mul(y, z)], j] += fy
    return mat


def hilbert_algebra_norm(f: WeightedSection) -> float:
    """l^2 norm plus the operator norm of left convolution, on a finite group.

    Counting measure: delta_e has norm 1 + 1 = 2 and stays the multiplicative
    unit; the normalization is recorded in instance metadata.
    """
    if not isinstance(f.group, CyclicGroup):
        raise ZooError("Hilbert-algebra norm needs a finite group model")
    if not f.terms:
        return 0.0
    l2 = math.sqrt(sum(abs(v) ** 2 for v in f.terms.values()))
    return l2 + operator_norm(left_convolution_matrix(f))


# ------------------------------------------------------------------ instances


@dataclass(frozen=True)
class AlgebraInstance:
    """A named norm pair on a concrete carrier.

    ``a_norm`` is the subalgebra norm, ``b_norm`` the ambient C*-norm
    evaluator (None when no computable oracle exists for the carrier).
    ``b_dominance`` is a constant with b_norm <= b_dominance * a_norm;
    ``submult_constant`` with a_norm(xy) <= submult_constant * a_norm(x)a_norm(y).
    """

    name: str
    carrier: str  # "matrix" | "section" | "trig"
    a_norm: Callable
    b_norm: Optional[Callable]
    declared: Optional[DiffTriple] = None
    group: Optional[GroupModel] = None
    weight: Optional[Weight] = None
    involution_constant: float = 1.0
    submult_constant: float = 1.0
    b_dominance: float = 1.0
    meta: dict = field(default_factory=dict, compare=False)


def elem_mul(inst: AlgebraInstance, x, y):
    if inst.carrier == "matrix":
        return mat_mul(x, y)
    if inst.carrier == "section":
        return convolve(x, y)
    return trig_mul(x, y)


def elem_square(inst: AlgebraInstance, x):
    """Squaring hook for repeated-squaring loops; weight-aware pruning on lattices."""
    if inst.carrier == "section" and inst.weight is not None:
        return sec.convolve_pruned(x, x, inst.weight, 1e-13)
    return elem_mul(inst, x, x)


def elem_adjoint(inst: AlgebraInstance, x):
    if inst.carrier == "matrix":
        return adjoint(x)
    if inst.carrier == "section":
        return section_adjoint(x)
    return x.conj_reflect()


def elem_scale(inst: AlgebraInstance, x, c: complex):
    if inst.carrier == "matrix":
        return np.asarray(x) * c
    if inst.carrier == "section":
        return sec.scale(x, c)
    return TrigPolynomial.from_dict({n: c * v for n, v in x.coeffs})


def elem_sub(inst: AlgebraInstance, x, y):
    if inst.carrier == "matrix":
        return np.asarray(x) - np.asarray(y)
    if inst.carrier == "section":
        return sec.add(x, sec.scale(y, -1.0))
    return trig_add(x, TrigPolynomial.from_dict({n: -v for n, v in y.coeffs}))


def trig_add(f: TrigPolynomial, g: TrigPolynomial) -> TrigPolynomial:
    out = f.to_dict()
    for n, v in g.coeffs:
        out[n] = out.get(n, 0.0) + v
    return TrigPolynomial.from_dict(out)


def elem_is_zero(inst: AlgebraInstance, x) -> bool:
    if inst.carrier == "matrix":
        return bool(np.all(np.asarray(x) == 0))
    if inst.carrier == "section":
        return not x.terms
    return not x.coeffs


def elem_self_adjoint_defect(inst: AlgebraInstance, x) -> float:
    diff = elem_sub(inst, x, elem_adjoint(inst, x))
    return inst.a_norm(diff)


# ------------------------------------------------------------------ registry


def _parse_group_token(tok: str) -> GroupModel:
    if tok.startswith("z") and tok[1:].isdigit():
        return ZdGroup(int(tok[1:]))
    if tok.startswith("free") and tok[4:].isdigit():
        return FreeGroup(int(tok[4:]))
    if tok == "heis":
        return HeisenbergGroup()
    if tok.startswith("cyclic") and tok[6:].isdigit():
        return CyclicGroup(int(tok[6:]))
    raise ZooError(f"unknown group token {tok!r}")


def _parse_exponent(tok: str):
    return math.inf if tok == "inf" else float(Fraction(tok))


def _matrix_family_instance(name: str, family: str, p, alpha: float) -> AlgebraInstance:
    norm_fun = {"groschur": groschur_norm, "bgs": bgs_norm, "beurling": beurling_norm}[family]
    declared = None
    inv_p = 0.0 if math.isinf(p) else 1.0 / p
    if alpha > 1.0 - inv_p:
        p_exact = "inf" if math.isinf(p) else Fraction(p).limit_denominator(10**6)
        alpha_exact = Fraction(alpha).limit_denominator(10**6)
        _, declared = shin_sun_exponent(p_exact, alpha_exact)
    return AlgebraInstance(
        name=name,
        carrier="matrix",
        a_norm=lambda a, _f=norm_fun: _f(a, p, alpha),
        b_norm=operator_norm,
        declared=declared,
        submult_constant=math.inf,  # submultiplicative only up to a family constant
        b_dominance=gs_b_dominance(alpha),
        meta={"family": family, "p": p, "alpha": alpha},
    )


def resolve_instance(name: str) -> AlgebraInstance:
    """Look up an instance by registry name, e.g. 'schatten:2' or 'l1w:z1:poly:2'."""
    parts = name.split(":")
    head = parts[0]

    if head == "opnorm" and len(parts) == 1:
        return AlgebraInstance(
            name=name,
            carrier="matrix",
            a_norm=operator_norm,
            b_norm=operator_norm,
            declared=DiffTriple(2, 1, 1, c_estimate=1.0),
        )

    if head == "schatten" and len(parts) == 2:
        p = _parse_exponent(parts[1])
        if p < 1:
            raise ZooError("Schatten exponent must be >= 1")
        return AlgebraInstance(
            name=name,
            carrier="matrix",
            a_norm=lambda a: schatten_norm(a, p),
            b_norm=operator_norm,
            declared=DiffTriple(2, 1, 1, c_estimate=1.0),
            meta={"p": p},
        )

    if head == "jaffard" and len(parts) == 2:
        alpha = float(parts[1])
        return _matrix_family_instance(name, "groschur", math.inf, alpha)

    if head in ("groschur", "bgs", "beurling") and len(parts) == 3:
        return _matrix_family_instance(name, head, _parse_exponent(parts[1]), float(parts[2]))

    if head == "c1-torus" and len(parts) == 1:
        return AlgebraInstance(
            name=name,
            carrier="trig",
            a_norm=deriv_domain_norm,
            b_norm=trig_sup_norm,
            declared=DiffTriple(2, 1, 1, c_estimate=2.0),
        )

    if head in ("l1w", "l2w") and len(parts) >= 3:
        group = _parse_group_token(parts[1])
        weight = weight_from_name(":".join(parts[2:]))
        p_norm = 1.0 if head == "l1w" else 2.0
        b_norm = None
        if isinstance(group, ZdGroup) and group.d <= 2:
            b_norm = cstar_norm_abelian
        return AlgebraInstance(
            name=name,
            carrier="section",
            a_norm=lambda f, _w=weight, _p=p_norm: weighted_lp_norm(f, _w, _p),
            b_norm=b_norm,
            group=group,
            weight=weight,
            submult_constant=1.0 if head == "l1w" else math.inf,
            meta={"p": p_norm, "weight": weight.descriptor()},
        )

    if head == "hilbert" and len(parts) == 3 and parts[1] == "cyclic":
        group = CyclicGroup(int(parts[2]))
        return AlgebraInstance(
            name=name,
            carrier="section",
            a_norm=hilbert_algebra_norm,
            b_norm=lambda f: operator_norm(left_convolution_matrix(f)),
            declared=DiffTriple(2, 1, 1),
            group=group,
            weight=Weight("one"),
            meta={"measure": "counting"},
        )

    raise ZooError(f"unknown instance name {name!r}")


REGISTRY_PATTERNS = [
    ("opnorm", "matrix C*-algebra itself (A = B = operator norm)"),
    ("schatten:P", "Schatten-P ideal norm over the operator norm, P >= 1"),
    ("jaffard:ALPHA", "Jaffard algebra on a finite window, decay exponent ALPHA"),
    ("groschur:P:ALPHA", "Schur-type row/column weighted l^P norm"),
    ("bgs:P:ALPHA", "diagonal-wise weighted l^P norm"),
    ("beurling:P:ALPHA", "nested-supremum weighted l^P norm"),
    ("c1-torus", "once-differentiable functions on the circle, sup + sup of derivative"),
    ("l1w:GROUP:WEIGHT", "weighted l^1 convolution algebra (GROUP in z1,z2,free2,heis,cyclicN)"),
    ("l2w:GROUP:WEIGHT", "weighted l^2 convolution space (WEIGHT in one, poly:S, subexp:D:A)"),
    ("hilbert:cyclic:N", "finite-group Hilbert algebra norm, counting measure"),
]
