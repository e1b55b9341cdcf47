"""Growth of unitary orbits u(t a) = e^{ita} - 1 and the supporting machinery:
the subadditive/power sequence bound, the binomial-sum identity behind it,
the rescaling constant, and exponent fitting of measured orbit norms.

Matrix carriers exponentiate through the eigensolver.  Lattice sections use
an exact Bessel expansion when the symbol is a pure cosine (support {-1, +1}
with equal real values) and torus quadrature with a Richardson consistency
check otherwise; both truncate with a certified weighted tail bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.special import jv

from .groups import ZdGroup
from .matrices import mat_exp_hermitian
from .sections import WeightedSection, Weight
from .zoo import (
    AlgebraInstance,
    DiffTriple,
    TrigPolynomial,
    elem_is_zero,
    elem_mul,
    elem_scale,
    elem_self_adjoint_defect,
    elem_sub,
    trig_add,
)

QUADRATURE_BASE_GRID = 1 << 12
TRUNCATION_REL_TOL = 1e-13
COMB_K_CAP = 60


class GrowthError(ValueError):
    pass


def _require_self_adjoint(x, inst: AlgebraInstance):
    defect = elem_self_adjoint_defect(inst, x)
    if defect > 1e-10 * (1.0 + inst.a_norm(x)):
        raise GrowthError(f"element is not self-adjoint in the instance (defect {defect:.3e})")


def u_of(x, inst: AlgebraInstance, t: float):
    """The orbit element e^{i t x} - 1 inside the (non-unital) carrier."""
    _require_self_adjoint(x, inst)
    if inst.carrier == "matrix":
        n = np.asarray(x).shape[0]
        return mat_exp_hermitian(x, t) - np.eye(n)
    if inst.carrier == "section":
        if not isinstance(x.group, ZdGroup) or x.group.d > 2:
            raise GrowthError("section exponentials implemented on Z^d, d <= 2")
        weight = inst.weight if inst.weight is not None else Weight("one")
        if x.group.d == 1:
            coeffs = _u_coeffs_line(x, t, weight)
            return WeightedSection(x.group, {(n,): v for n, v in coeffs.items()})
        return _u_section_plane(x, t, weight)
    # trig carrier: coefficients on Z, pruned against sup + derivative-sup growth
    section = x.section()
    coeffs = _u_coeffs_line(section, t, Weight("poly", s=1.0))
    return TrigPolynomial.from_dict(coeffs)


def _is_pure_cosine(f: WeightedSection) -> Optional[float]:
    """Coefficient c when f = c(delta_1 + delta_-1) with real c, else None."""
    if set(f.terms.keys()) != {(1,), (-1,)}:
        return None
    a, b = f.terms[(1,)], f.terms[(-1,)]
    if a != b or abs(a.imag) > 1e-15 * (1 + abs(a)):
        return None
    return float(a.real)


def _weighted_bessel_cut(weight: Weight, z: float, rel_tol: float) -> int:
    """Smallest N so the weighted Bessel tail beyond N certifies below rel_tol
    of the accumulated actual weighted mass.

    Tail terms are dominated by nu(n) (|z|/2)^n / n!, whose ratio drops below
    1/2 once n exceeds |z| (the weight ratio tends to 1), so twice the first
    bound term dominates the whole tail.
    """
    half = abs(z) / 2.0
    if half == 0.0:
        return 1
    mass = float(weight.on_length(0)) * abs(float(jv(0, z)) - 1.0)
    log_b = 0.0  # log of (|z|/2)^n / n! at n = 0
    n = 0
    while True:
        n += 1
        log_b += math.log(half) - math.log(n)
        mass += 2.0 * float(weight.on_length(n)) * abs(float(jv(n, z)))
        if n > 2.0 * half + 4:
            ratio = (float(weight.on_length(n + 2)) / float(weight.on_length(n + 1))) * (
                half / (n + 2)
            )
            log_next = log_b + math.log(half) - math.log(n + 1)
            tail_bound = 2.0 * float(weight.on_length(n + 1)) * math.exp(min(log_next, 700.0))
            if ratio <= 0.5 and tail_bound <= rel_tol * max(mass, 1e-300):
                return n
        if n > 100000:
            raise GrowthError("Bessel truncation did not certify; argument too large")


def _u_coeffs_line(f: WeightedSection, t: float, weight: Weight) -> dict:
    """Fourier coefficients of e^{i t sigma(theta)} - 1 for a 1-D lattice symbol."""
    if not f.terms or t == 0.0:
        return {}
    c = _is_pure_cosine(f)
    if c is not None:
        z = 2.0 * c * t
        cut = _weighted_bessel_cut(weight, z, TRUNCATION_REL_TOL)
        ns = np.arange(0, cut + 1)
        bess = jv(ns, z)
        coeffs = {}
        for n in ns:
            val = (1j**int(n)) * bess[n]
            if n == 0:
                val -= 1.0
            if val != 0:
                coeffs[int(n)] = complex(val)
                if n > 0:
                    coeffs[-int(n)] = complex((1j ** int(n)) * bess[n])
        return coeffs
    return _u_coeffs_quadrature(f, t, weight)


def _u_coeffs_quadrature(f: WeightedSection, t: float, weight: Weight) -> dict:
    """Torus-quadrature coefficients with a Richardson doubling check."""
    grid = QUADRATURE_BASE_GRID
    prev = None
    while grid <= (1 << 16):
        coeffs = _quadrature_pass(f, t, grid)
        if prev is not None:
            dev = max(
                abs(coeffs.get(n, 0.0) - prev.get(n, 0.0)) for n in set(coeffs) | set(prev)
            )
            if dev <= 1e-12:
                break
        prev = coeffs
        grid *= 2
    else:
        raise GrowthError("quadrature grid exhausted without Richardson agreement")
    return _prune_weighted_coeffs(coeffs, weight, TRUNCATION_REL_TOL)


def _quadrature_pass(f: WeightedSection, t: float, grid: int) -> dict:
    thetas = 2.0 * math.pi * np.arange(grid) / grid
    symbol = np.zeros(grid, dtype=np.complex128)
    for (n,), v in f.terms.items():
        symbol += v * np.exp(1j * n * thetas)
    if np.max(np.abs(symbol.imag)) > 1e-9 * (1.0 + np.max(np.abs(symbol))):
        raise GrowthError("symbol is not real: element not self-adjoint")
    values = np.exp(1j * t * symbol.real) - 1.0
    spec = np.fft.fft(values) / grid
    window = grid // 4
    coeffs = {}
    for n in range(-window, window + 1):
        val = spec[n % grid]
        if abs(val) > 1e-16:
            coeffs[n] = complex(val)
    return coeffs


def _prune_weighted_coeffs(coeffs: dict, weight: Weight, rel_tol: float) -> dict:
    if not coeffs:
        return {}
    ns = np.array(list(coeffs.keys()))
    vals = np.array(list(coeffs.values()))
    weighted = np.abs(vals) * np.asarray(weight.on_length(np.abs(ns)), dtype=float)
    total = float(np.sum(weighted))
    keep = weighted >= rel_tol * total / max(len(coeffs), 1)
    return {int(n): complex(v) for n, v, k in zip(ns, vals, keep) if k}


def _u_section_plane(f: WeightedSection, t: float, weight: Weight) -> WeightedSection:
    grid = 1 << 9
    pts = np.array(list(f.terms.keys()), dtype=np.int64)
    vals = np.fromiter(f.terms.values(), dtype=np.complex128, count=len(f.terms))
    axis = 2.0 * math.pi * np.arange(grid) / grid
    th1, th2 = np.meshgrid(axis, axis, indexing="ij")
    symbol = np.zeros((grid, grid), dtype=np.complex128)
    for (n1, n2), v in zip(pts, vals):
        symbol += v * np.exp(1j * (n1 * th1 + n2 * th2))
    values = np.exp(1j * t * symbol.real) - 1.0
    spec = np.fft.fft2(values) / (grid * grid)
    window = grid // 4
    coeffs = {}
    for m1 in range(-window, window + 1):
        row = spec[m1 % grid]
        for m2 in range(-window, window + 1):
            v = row[m2 % grid]
            if abs(v) > 1e-15:
                coeffs[(m1, m2)] = complex(v)
    terms = {}
    if coeffs:
        keys = list(coeffs.keys())
        lengths = np.array([abs(a) + abs(b) for a, b in keys])
        weighted = np.abs(np.array([coeffs[k] for k in keys])) * np.asarray(
            weight.on_length(lengths), dtype=float
        )
        total = float(np.sum(weighted))
        for k, w in zip(keys, weighted):
            if w >= TRUNCATION_REL_TOL * total / len(keys):
                terms[k] = coeffs[k]
    return WeightedSection(f.group, terms)


def cocycle_residual(x, inst: AlgebraInstance, s: float, t: float) -> float:
    """A-norm of u((s+t)x) - u(sx)u(tx) - u(sx) - u(tx)."""
    us, ut, ust = u_of(x, inst, s), u_of(x, inst, t), u_of(x, inst, s + t)
    prod = elem_mul(inst, us, ut)
    resid = elem_sub(inst, elem_sub(inst, elem_sub(inst, ust, prod), us), ut)
    return inst.a_norm(resid)


# ------------------------------------------------------------------ traces


@dataclass
class GrowthTrace:
    t_grid: np.ndarray
    norms: np.ndarray
    tau_bound: float
    tau_fit: float
    fit_quality: float
    passes: bool
    flags: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)


def growth_trace(
    x,
    inst: AlgebraInstance,
    triple: DiffTriple,
    t_max: float,
    points: int,
    *,
    slack: float = 0.1,
    t_min: float = 1.0,
) -> GrowthTrace:
    """Measure ||u(t x)||_A on a log-spaced grid and fit the growth exponent.

    tau_fit regresses log log(norm + e) on log t over the upper half of the
    grid; R^2 below 0.98 flags the fit UNRELIABLE rather than failing.
    """
    if points < 4:
        raise GrowthError("need at least 4 grid points")
    t_grid = np.geomspace(t_min, t_max, points)
    norms = np.array([inst.a_norm(u_of(x, inst, float(t))) for t in t_grid])
    tau_bound = triple.tau_bound()
    upper = slice(points // 2, points)
    xs = np.log(t_grid[upper])
    ys = np.log(np.log(norms[upper] + math.e))
    slope, intercept = np.polyfit(xs, ys, 1)
    pred = slope * xs + intercept
    ss_res = float(np.sum((ys - pred) ** 2))
    ss_tot = float(np.sum((ys - np.mean(ys)) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    flags = []
    bounded = bool(np.max(norms) <= np.min(norms[norms > 0], initial=1.0) * 4.0 + 4.0)
    if bounded:
        flags.append("BOUNDED")
    if r2 < 0.98:
        flags.append("UNRELIABLE")
    passes = bounded or (float(slope) <= tau_bound + slack)
    return GrowthTrace(
        t_grid=t_grid,
        norms=norms,
        tau_bound=tau_bound,
        tau_fit=float(slope),
        fit_quality=r2,
        passes=passes,
        flags=flags,
        meta={"slack": slack, "fit_window": "upper half", "intercept": float(intercept)},
    )


# ------------------------------------------------- sequence lemma machinery


def comb_identity(k: int) -> tuple[int, int]:
    """Exact binomial-sum identity value pair (LHS, 2^k - 2)."""
    if k < 2:
        raise GrowthError("k must be >= 2")
    if k > COMB_K_CAP:
        raise GrowthError(f"k capped at {COMB_K_CAP} for the exact identity table")
    lhs = sum(math.comb(k - 1, b) for b in range(k - 1))
    lhs += sum(math.comb(a, b) for a in range(k - 1) for b in range(a + 1))
    return lhs, 2**k - 2


def d_constant(k: int, q: float, gamma: float, c: float) -> float:
    """Smallest rescaling constant D = max(2^k, 2^q c + 2^k - 1)^{1/(gamma-1)}, >= 1."""
    if gamma <= 1:
        raise GrowthError("gamma must exceed 1")
    if c <= 0:
        raise GrowthError("c must be positive")
    base = max(2.0**k, (2.0**q) * c + 2.0**k - 1.0)
    return max(base ** (1.0 / (gamma - 1.0)), 1.0)


def asymp_check(
    a_of: Callable[[int], float], k: int, gamma: float, n_max: int, *, rel_eps: float = 1e-12
) -> dict:
    """Scan the subadditive/power hypotheses exhaustively and verify the
    explicit growth bound a_n <= exp(A (k-1)(2 + log_k n) k n^{log_k gamma}).

    Hypotheses checked on all pairs up to n_max; any violation aborts with the
    offending pair.  A = ln(a_1).
    """
    if k < 2:
        raise GrowthError("k must be >= 2")
    if not (1.0 < gamma < k + 1e-12):
        raise GrowthError("gamma must lie in (1, k]")
    vals = [math.nan] + [float(a_of(n)) for n in range(1, n_max + 1)]
    for n in range(1, n_max + 1):
        if not (vals[n] >= 0.0 and math.isfinite(vals[n])):
            raise GrowthError(f"sequence value a_{n} = {vals[n]} is not a finite nonnegative real")
    for n in range(1, n_max + 1):
        for m in range(n, n_max - n + 1):
            if vals[n + m] > vals[n] * vals[m] * (1.0 + rel_eps):
                return {
                    "pass": False,
                    "hypothesis": "subadditive",
                    "counterexample": {"n": n, "m": m, "a_n+m": vals[n + m], "a_n*a_m": vals[n] * vals[m]},
                }
    for n in range(1, n_max // k + 1):
        if vals[k * n] > vals[n] ** gamma * (1.0 + rel_eps):
            return {
                "pass": False,
                "hypothesis": "power",
                "counterexample": {"n": n, "a_kn": vals[k * n], "a_n^gamma": vals[n] ** gamma},
            }
    big_a = math.log(vals[1]) if vals[1] > 0 else -math.inf
    exponent = math.log(gamma) / math.log(k)
    ratios = []
    for n in range(1, n_max + 1):
        log_bound = big_a * (k - 1) * (2.0 + math.log(n) / math.log(k)) * k * n**exponent
        log_val = math.log(vals[n]) if vals[n] > 0 else -math.inf
        ratios.append(log_val - log_bound)
    worst = max(ratios)
    return {
        "pass": bool(worst <= rel_eps),
        "hypothesis": "both verified",
        "tightest_log_ratio": worst,
        "tightest_n": int(1 + ratios.index(worst)),
        "exponent": exponent,
    }


def polynomial_expansion_check(x, inst: AlgebraInstance, k: int, n: int) -> dict:
    """Residual of the binomial orbit identity expressing u(k n x) in powers of
    z = u(n x); returns the A-norm of the difference and its pass threshold."""
    if k < 2:
        raise GrowthError("k must be >= 2")
    z = u_of(x, inst, float(n))
    lhs = u_of(x, inst, float(k * n))
    if elem_is_zero(inst, z):
        resid = inst.a_norm(lhs)
        return {"residual": resid, "threshold": 1e-8, "pass": bool(resid <= 1e-8)}
    powers = [z]
    for _ in range(k - 1):
        powers.append(elem_mul(inst, powers[-1], z))
    rhs = powers[k - 1]  # z^k
    for b in range(k - 1):
        rhs = _axpy(inst, rhs, powers[b], float(math.comb(k - 1, b)))
    for a in range(k - 1):
        for b in range(a + 1):
            rhs = _axpy(inst, rhs, powers[b], float(math.comb(a, b)))
    resid = inst.a_norm(elem_sub(inst, lhs, rhs))
    z_norm = inst.a_norm(z)
    threshold = 1e-8 * (1.0 + z_norm**k)
    return {"residual": resid, "threshold": threshold, "pass": bool(resid <= threshold)}


def _axpy(inst: AlgebraInstance, acc, term, coeff: float):
    scaled = elem_scale(inst, term, coeff)
    if inst.carrier == "matrix":
        return acc + scaled
    if inst.carrier == "section":
        from .sections import add as sec_add

        return sec_add(acc, scaled)
    return trig_add(acc, scaled)


def bessel_orbit_oracle(weight: Weight, coefficient: float, t: float) -> float:
    """Independent weighted-l^1 value of the orbit of c(delta_1 + delta_-1):
    sum_n nu(n) |J_n(2 c t)| with the n = 0 term |J_0(2 c t) - 1|."""
    z = 2.0 * coefficient * t
    cut = _weighted_bessel_cut(weight, z, 1e-15)
    ns = np.arange(0, cut + 1)
    bess = jv(ns, z)
    total = float(weight.on_length(0)) * abs(bess[0] - 1.0)
    nus = np.asarray(weight.on_length(ns[1:]), dtype=float)
    total += 2.0 * float(np.sum(nus * np.abs(bess[1:])))
    return total
