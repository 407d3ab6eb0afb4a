"""Numerically positive rank-one projections and their search machinery.

A pair (u, f) with integral pairing f(u) = 1 spans the projection
P = f (x) u; the pair is accepted when ||I - P|| = 1.  The defect of an
element u is inf over admissible f of ||I - P|| - 1, minimized here by a
cutting-plane loop whose inner oracle enumerates ball vertices exactly on
polytope norms and falls back to multistart ascent elsewhere.  Also the
sign-compatibility check, local quadratic-weight recovery, the basis-pair
uniqueness search, the growth-constant estimate over found elements, and
the quadrant-separation oracle for sign vectors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .dyadic import StepFunction, basis, pairing
from .norms import (
    LorentzNorm,
    LpNorm,
    NormSpec,
    OrliczNorm,
    _refined_lorentz_weights,
    check_property_P,
    check_property_P_prime,
    eval_norm,
    min_level,
    norm_array,
    norming_direction,
)
from .operators import _sign_vectors, _signed_subsets, ascent_starts

_F_BOUND = 1e6  # master-problem box; keeps unbounded directions out of the solver


@dataclass(frozen=True)
class FlinnCandidate:
    u: StepFunction
    f: StepFunction
    spec: NormSpec

    def pairing(self):
        return pairing(self.f, self.u)


@dataclass(frozen=True)
class FlinnVerdict:
    status: str  # "true" | "false" | "inconclusive"
    lower: float
    upper: float | None
    witness: StepFunction | None
    certified: bool
    detail: str


@dataclass(frozen=True)
class DefectResult:
    defect: float          # best observed ||I - P|| - 1, clipped at 0
    lower_bound: float     # certified from the accumulated cuts, clipped at 0
    f: StepFunction
    certified: bool        # inner oracle exact (bounds bracket the true value)
    iterations: int
    n_witnesses: int


def _proj_apply(fW: np.ndarray, uW: np.ndarray, X: np.ndarray) -> np.ndarray:
    """(I - f(x)u) applied to the columns of X at a common level."""
    coef = fW @ X / len(fW)
    return X - np.outer(uW, coef)


def _indicator_pool(spec: NormSpec, level: int) -> list:
    out = []
    for lvl in range(min_level(spec), level + 1):
        for k in range(2 ** lvl):
            x = basis(lvl, k + 1).refine(level).to_array()
            out.append(x / norm_array(spec, x, level))
    return out


def _oracle_exact_kind(spec: NormSpec, dim: int) -> str | None:
    if isinstance(spec, LpNorm) and spec.p == 1:
        return "l1"
    if isinstance(spec, LpNorm) and spec.p == math.inf and dim <= 12:
        return "linf"
    if isinstance(spec, LpNorm) and spec.p == 2:
        return "l2"
    if isinstance(spec, LorentzNorm) and dim <= 8:
        return "lorentz"
    return None


def _inner_oracle(spec: NormSpec, fW: np.ndarray, uW: np.ndarray, level: int,
                  n_new: int = 8, seed: int = 0, warm=(), light: bool = False):
    """max over the unit ball of ||x - <f,x> u|| plus the top witnesses.

    Returns (value, witnesses, exact).  Exact on L1/Linf/Lorentz by vertex
    enumeration and on L2 spectrally; otherwise an ascent lower bound warm
    started from previously winning witnesses.
    """
    dim = len(uW)
    kind = _oracle_exact_kind(spec, dim)
    if kind == "l1":
        X = np.eye(dim) * dim
        X = np.hstack([X, -X])
    elif kind == "linf":
        X = _sign_vectors(dim).T
    elif kind == "lorentz":
        P = _signed_subsets(dim)
        scale = np.array([norm_array(spec, row, level) for row in P])
        X = (P / scale[:, None]).T
    elif kind == "l2":
        A = np.eye(dim) - np.outer(uW, fW) / dim
        U, S, Vt = np.linalg.svd(A)
        order = np.argsort(-S)[:n_new]
        wits = [Vt[i] / norm_array(spec, Vt[i], level) for i in order]
        return float(S.max()), wits, True
    else:
        return _inner_ascent(spec, fW, uW, level, n_new, seed, warm, light=light)
    vals = np.array([norm_array(spec, col, level)
                     for col in _proj_apply(fW, uW, X).T])
    order = np.argsort(-vals)[:n_new]
    return float(vals.max()), [X[:, i].copy() for i in order], True


def _inner_ascent(spec, fW, uW, level, n_new, seed, warm=(),
                  n_starts: int = 24, n_steps: int = 300, light: bool = False):
    if light:
        n_starts, n_steps = 8, 60
    rng = np.random.Generator(np.random.PCG64(seed))
    dim = len(uW)
    starts = list(warm) + ascent_starts(dim, rng, n_starts)
    starts.append(uW.copy())
    if dim <= 64 and not light:
        eye = np.eye(dim)
        starts.extend(eye[j] for j in range(dim))
        starts.extend(-eye[j] for j in range(dim))
    if isinstance(spec, LpNorm) and 1 < spec.p < math.inf:
        found = [_power_iteration(spec.p, fW, uW, x0, n_steps) for x0 in starts]
        found = [t for t in found if t is not None]
    else:
        found = [_gradient_ascent(spec, fW, uW, level, x0, n_steps) for x0 in starts]
        found = [t for t in found if t is not None]
    found.sort(key=lambda t: -t[0])
    best = found[0][0]
    out, seen = [], []
    for _, x in found:
        key = tuple(np.round(x, 9))
        if key not in seen:
            seen.append(key)
            out.append(x)
        if len(out) >= n_new:
            break
    return best, out, False


def _power_iteration(p, fW, uW, x0, n_iters):
    """Duality-map fixed-point iteration for the Lp ratio; the reliable inner
    maximizer on smooth Lp balls."""
    dim = len(uW)

    def norm_p(v):
        return float((np.abs(v) ** p).mean() ** (1.0 / p))

    x = np.asarray(x0, dtype=float)
    nx = norm_p(x)
    if nx == 0:
        return None
    x = x / nx
    prev = -math.inf
    for _ in range(n_iters):
        y = x - (fW @ x / dim) * uW
        val = norm_p(y)
        if val == 0 or val - prev < 1e-15 * max(val, 1.0):
            break
        prev = val
        z = np.sign(y) * np.abs(y) ** (p - 1)
        w = z - fW * (uW @ z / dim)
        mag = float(np.abs(w).max())
        if mag == 0:
            break
        w = w / mag
        x = np.sign(w) * np.abs(w) ** (1.0 / (p - 1))
        x = x / norm_p(x)
    val = norm_p(x - (fW @ x / dim) * uW)
    return val, x


def _gradient_ascent(spec, fW, uW, level, x0, n_steps):
    x = np.asarray(x0, dtype=float)
    nx = norm_array(spec, x, level)
    if nx == 0:
        return None
    x = x / nx
    cur = norm_array(spec, _proj_apply(fW, uW, x[:, None])[:, 0], level)
    step = 1.0
    for _ in range(n_steps):
        y = _proj_apply(fW, uW, x[:, None])[:, 0]
        q = norming_direction(spec, y, level)
        g = q - fW * float(q @ uW) / len(uW)
        cand = x + step * g / max(float(np.abs(g).max()), 1e-300)
        nc = norm_array(spec, cand, level)
        if nc == 0:
            step *= 0.5
            continue
        cand = cand / nc
        new = norm_array(spec, _proj_apply(fW, uW, cand[:, None])[:, 0], level)
        if new > cur:
            x, cur = cand, new
            step = min(step * 1.5, 1e3)
        else:
            step *= 0.5
            if step < 1e-12:
                break
    return cur, x


def is_flinn_pair(cand: FlinnCandidate, tol: float = 1e-9,
                  level: int | None = None, seed: int = 0) -> FlinnVerdict:
    """Decide ||I - f(x)u|| = 1 over the level-`level` step functions.

    TRUE only under an exact inner maximization (vertex enumeration or the
    Hilbert-space identity ||I-P|| = ||f|| ||u||); a concrete witness above
    1 + tol refutes on any spec; otherwise inconclusive with bounds.
    """
    u, f, spec = cand.u, cand.f, cand.spec
    if all(v == 0 for v in u.values):
        raise ValueError("no projection onto the zero span")
    pr = cand.pairing()
    if abs(float(pr) - 1.0) > 1e-12:
        raise ValueError(f"pairing is {float(pr)}, not 1")
    level = level if level is not None else max(u.level, f.level, min_level(spec))
    level = max(level, u.level, f.level, min_level(spec))
    uW = u.refine(level).to_array()
    fW = f.refine(level).to_array()

    if isinstance(spec, LpNorm) and spec.p == 2:
        val = norm_array(spec, fW, level) * norm_array(spec, uW, level)
        if val <= 1 + tol:
            return FlinnVerdict("true", max(val, 1.0), max(val, 1.0), None, True,
                                "orthogonal rank-one projection")
        _, wits, _ = _inner_oracle(spec, fW, uW, level, n_new=1, seed=seed)
        return FlinnVerdict("false", val, val, StepFunction(level, tuple(wits[0])),
                            True, "skew projection: ||f|| ||u|| > 1")

    val, wits, exact = _inner_oracle(spec, fW, uW, level, n_new=1, seed=seed)
    witness = StepFunction(level, tuple(wits[0])) if wits else None
    if exact and val <= 1 + tol:
        return FlinnVerdict("true", max(val, 1.0), max(val, 1.0), None, True,
                            "vertex enumeration stayed at 1")
    if val > 1 + tol:
        return FlinnVerdict("false", val, val if exact else None, witness,
                            True, "witness exceeds 1 + tol")
    return FlinnVerdict("inconclusive", val, None, witness, False,
                        "ascent found nothing above 1 + tol")


class _MasterUnsupported(Exception):
    pass


def _norm_expr(spec: NormSpec, vexpr, level: int):
    import cvxpy as cp

    if isinstance(spec, LpNorm):
        if spec.p == math.inf:
            return cp.norm(vexpr, "inf")
        return cp.norm(vexpr, spec.p) * (2.0 ** -level) ** (1.0 / spec.p)
    if isinstance(spec, LorentzNorm):
        _, w = _refined_lorentz_weights(spec, level)
        terms = []
        for k in range(1, len(w) + 1):
            delta = w[k - 1] - (w[k] if k < len(w) else 0.0)
            if delta > 0:
                terms.append(delta * cp.sum_largest(cp.abs(vexpr), k))
        return cp.sum(terms) if len(terms) > 1 else terms[0]
    raise _MasterUnsupported(spec)


def _solve_master(spec, uW, level, witnesses, reduce_mat, pu):
    import cvxpy as cp

    n = reduce_mat.shape[1]
    fvar = cp.Variable(n)
    t = cp.Variable()
    cons = [pu @ fvar == 1, cp.norm(fvar, "inf") <= _F_BOUND]
    for x in witnesses:
        coef = (x @ reduce_mat) / len(uW)
        cons.append(_norm_expr(spec, x - (coef @ fvar) * uW, level) <= t)
    prob = cp.Problem(cp.Minimize(t), cons)
    last = None
    import warnings

    for solver in (cp.CLARABEL, cp.ECOS, cp.SCS):
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")  # inaccurate-solve warnings are fine
                prob.solve(solver=solver)
        except Exception as exc:  # solver-specific failures: try the next one
            last = exc
            continue
        if fvar.value is not None:
            return np.asarray(fvar.value, dtype=float), float(t.value)
    raise RuntimeError(f"master problem unsolved: {last}")


def _subgradient_fallback(spec, u, level, witness_level, tol, max_outer, seed):
    """Projected subgradient descent on f for norms without a master encoding."""
    W = witness_level
    uW = u.refine(W).to_array()
    uN = u.refine(level).to_array()
    pu = uN / 2 ** level
    f = uN / float(uN @ uN / 2 ** level)
    rep = 2 ** (W - level)
    best_val, best_f = math.inf, f.copy()
    step0 = 1.0
    for it in range(max_outer):
        fW = np.repeat(f, rep)
        val, wits, _ = _inner_oracle(spec, fW, uW, W, n_new=1, seed=seed + it,
                                     light=True)
        if val < best_val:
            best_val, best_f = val, f.copy()
        x = wits[0]
        y = _proj_apply(fW, uW, x[:, None])[:, 0]
        q = norming_direction(spec, y, W)
        gW = -float(q @ uW) / len(uW) * x
        g = np.add.reduceat(gW, np.arange(0, len(gW), rep)) if rep > 1 else gW
        g = g - pu * float(g @ pu) / float(pu @ pu)
        nrm = float(np.abs(g).max())
        if nrm < 1e-15:
            break
        f = f - step0 / (1 + it) ** 0.5 * g / nrm
        f = f + pu * (1 - float(f @ pu)) / float(pu @ pu)
    return DefectResult(max(best_val - 1, 0.0), 0.0,
                        StepFunction(level, tuple(best_f)), False, max_outer, 1)


def flinn_defect(spec: NormSpec, u: StepFunction, level: int | None = None,
                 witness_level: int | None = None, tol: float = 1e-8,
                 max_outer: int = 200, max_witnesses: int = 64,
                 seed: int = 0) -> DefectResult:
    """inf over f with f(u) = 1 of ||I - f(x)u|| - 1 over X_level, with the
    inner maximization running over X_witness_level.

    Cutting planes: every witness x contributes the exact convex cut
    f -> ||x - <f,x> u||; the master minimum over accumulated cuts is a true
    lower bound, and with an exact inner oracle the two bounds bracket the
    value to `tol`.
    """
    if all(v == 0 for v in u.values):
        raise ValueError("defect of the zero element is undefined")
    level = max(level if level is not None else u.level, u.level, min_level(spec))
    W = max(witness_level if witness_level is not None else level, level)

    uW = u.refine(W).to_array()
    if isinstance(spec, LpNorm) and spec.p == 2:
        uN = u.refine(level).to_array()
        f = uN / float(uN @ uN / 2 ** level)
        fW = np.repeat(f, 2 ** (W - level))
        A = np.eye(2 ** W) - np.outer(uW, fW) / 2 ** W
        val = float(np.linalg.svd(A, compute_uv=False).max())
        return DefectResult(max(val - 1, 0.0), max(val - 1, 0.0),
                            StepFunction(level, tuple(f)), True, 0, 0)

    if isinstance(spec, OrliczNorm):
        return _subgradient_fallback(spec, u, level, W, tol, max_outer, seed)

    uN = u.refine(level).to_array()
    pu = uN / 2 ** level
    rep = 2 ** (W - level)
    reduce_mat = np.kron(np.eye(2 ** level), np.ones((rep, 1)))

    pool = _indicator_pool(spec, W)
    rng = np.random.Generator(np.random.PCG64(seed))
    for _ in range(8):
        x = rng.choice([-1.0, 1.0], size=2 ** W)
        pool.append(x / norm_array(spec, x, W))

    denom = float(uN @ uN / 2 ** level)
    f = uN / denom if denom > 0 else pu / float(pu @ pu)
    upper, best_f = math.inf, f.copy()
    lower = 0.0
    exact = True
    it = 0
    for it in range(1, max_outer + 1):
        fW = np.repeat(f, rep)
        val, wits, oracle_exact = _inner_oracle(spec, fW, uW, W, seed=seed + it,
                                                warm=pool[:16])
        exact = exact and oracle_exact
        if val < upper:
            upper, best_f = val, f.copy()
        fWmat = fW
        pool.extend(wits)
        if len(pool) > max_witnesses:
            scores = [norm_array(spec, _proj_apply(fWmat, uW, x[:, None])[:, 0], W)
                      for x in pool]
            order = np.argsort(scores)[::-1][:max_witnesses]
            pool = [pool[i] for i in order]
        f_new, master_val = _solve_master(spec, uW, W, pool, reduce_mat, pu)
        lower = max(lower, master_val)
        if upper - lower <= tol:
            f = f_new
            fW = np.repeat(f, rep)
            val, _, _ = _inner_oracle(spec, fW, uW, W, seed=seed + it + 1)
            if val < upper:
                upper, best_f = val, f.copy()
            break
        f = f_new
    return DefectResult(max(upper - 1, 0.0), max(min(lower, upper) - 1, 0.0),
                        StepFunction(level, tuple(best_f)),
                        exact, it, len(pool))


def verify_sign_compatibility(cand: FlinnCandidate, tol: float = 1e-10):
    """Cellwise product f*u must be >= -tol for an accepted pair."""
    m = max(cand.u.level, cand.f.level)
    prods = [float(a) * float(b) for a, b in
             zip(cand.u.refine(m).values, cand.f.refine(m).values)]
    worst = min(prods)
    return worst >= -tol, worst


@dataclass(frozen=True)
class WeightRecovery:
    weights: np.ndarray
    residual: float
    mix_discrepancy: float


def recover_quadratic_weight(spec: NormSpec, u: StepFunction, xs,
                             off_support_vs=None, tol: float = 1e-8,
                             seed: int = 0) -> WeightRecovery:
    """Fit ||x||^2 = sum x_i^2 len_i w_i over samples supported on supp u,
    and check that ||v + x|| depends only on ||x|| for v off the support."""
    level = max(u.level, min_level(spec), max(x.level for x in xs))
    uv = u.refine(level).to_array()
    supp = np.nonzero(uv)[0]
    if supp.size == 0:
        raise ValueError("u has empty support")
    ell = 2.0 ** -level
    rows, targets = [], []
    for x in xs:
        xv = x.refine(level).to_array()
        if np.any(xv[np.setdiff1d(np.arange(len(xv)), supp)] != 0):
            raise ValueError("sample not supported on supp u")
        rows.append(xv[supp] ** 2 * ell)
        targets.append(eval_norm(spec, x.refine(level)) ** 2)
    A, b = np.array(rows), np.array(targets)
    w, *_ = np.linalg.lstsq(A, b, rcond=None)
    residual = float(np.abs(A @ w - b).max())

    mix = 0.0
    if off_support_vs:
        rng = np.random.Generator(np.random.PCG64(seed))
        for v in off_support_vs:
            i, j = rng.integers(len(xs)), rng.integers(len(xs))
            x, y = xs[int(i)], xs[int(j)]
            ny = eval_norm(spec, y)
            if ny == 0:
                continue
            y = y * (eval_norm(spec, x) / ny)
            mix = max(mix, abs(eval_norm(spec, v + x) - eval_norm(spec, v + y)))
    return WeightRecovery(w, residual, mix)


@dataclass(frozen=True)
class UniquenessReport:
    found: bool           # some admissible f passes at this level
    unique: bool          # every passing f coincides with the canonical one
    max_deviation: float  # sup-norm radius of the feasible box around it
    detail: str


def basis_pair_uniqueness(spec: NormSpec, level: int, j: int,
                          tol: float = 1e-9) -> UniquenessReport:
    """Within X_level, every f accepting the pair with the j-th basis cell
    must be the scaled indicator 2^level e_j; searched by bounding the
    feasible region over the exact vertex cuts coordinate by coordinate."""
    if not check_property_P(spec).holds:
        raise ValueError("uniqueness search requires the strict two-cell property")
    level = max(level, min_level(spec))
    u = basis(level, j)
    n = 2 ** level
    canonical = np.zeros(n)
    canonical[j - 1] = 2 ** level

    if isinstance(spec, LpNorm) and spec.p == 2:
        cand = FlinnCandidate(u, StepFunction(level, tuple(canonical)), spec)
        ok = is_flinn_pair(cand, tol=tol).status == "true"
        return UniquenessReport(ok, ok, 0.0, "unique orthogonal functional")

    kind = _oracle_exact_kind(spec, n)
    if kind is None:
        raise ValueError(f"no exact vertex description for {spec!r} at dim {n}")
    uW = u.to_array()
    _, wits, _ = _inner_oracle(spec, canonical, uW, level, n_new=10 ** 9)
    import cvxpy as cp

    res = flinn_defect(spec, u, level=level, witness_level=level, tol=1e-10)
    if res.lower_bound > tol:
        return UniquenessReport(False, True, 0.0,
                                f"no admissible f: defect >= {res.lower_bound:.3e}")
    pu = uW / n
    dev = 0.0
    for i in range(n):
        for sense in (1.0, -1.0):
            fvar = cp.Variable(n)
            cons = [pu @ fvar == 1, cp.norm(fvar, "inf") <= _F_BOUND]
            for x in wits:
                cons.append(_norm_expr(spec, x - (x @ fvar / n) * uW, level)
                            <= 1 + tol)
            prob = cp.Problem(cp.Maximize(sense * fvar[i]), cons)
            prob.solve(solver=cp.CLARABEL)
            if fvar.value is None:
                raise RuntimeError("bounding problem unsolved")
            dev = max(dev, abs(float(prob.value) - sense * canonical[i]))
    return UniquenessReport(True, dev <= max(10 * tol, 1e-7), dev,
                            f"feasible box radius {dev:.3e}")


@dataclass(frozen=True)
class GrowthConstantReport:
    per_level: dict       # level -> max ratio over found elements
    constant: float       # overall max
    trend_slope: float    # fitted slope of max ratio against level
    n_found: int


def estimate_growth_constant(spec: NormSpec, p: float, n_max: int,
                             n_candidates: int = 6, seed: int = 0,
                             defect_tol: float = 1e-7) -> GrowthConstantReport:
    """Over elements accepted at each level n <= n_max, the ratio
    (sum |a_i|^p)^{1/p} / max |a_i| of their coefficients; reports the max
    per level and the growth trend (flat means a level-free constant)."""
    if isinstance(spec, LpNorm) and spec.p == 2:
        raise ValueError("the growth estimate is vacuous on the Hilbert norm")
    if not check_property_P_prime(spec).holds:
        raise ValueError("estimate requires the dual two-cell property")
    if not 0 < p < math.inf:
        raise ValueError("p must be positive and finite")
    rng = np.random.Generator(np.random.PCG64(seed))
    per_level, n_found = {}, 0
    for n in range(1, n_max + 1):
        n = max(n, min_level(spec))
        best = 0.0
        cands = [basis(n, k + 1) for k in range(2 ** n)]
        for _ in range(n_candidates):
            vals = np.sort(rng.random(2 ** n))[::-1]
            vals = np.where(rng.random(2 ** n) < 0.3, 0.0, vals)
            if vals.max() == 0:
                vals[0] = 1.0
            cands.append(StepFunction(n, tuple(vals)))
        for u in cands:
            res = flinn_defect(spec, u, level=n, witness_level=n, tol=1e-9,
                               seed=seed)
            if res.defect <= defect_tol:
                n_found += 1
                a = np.abs(u.to_array())
                ratio = float((a ** p).sum() ** (1 / p) / a.max())
                best = max(best, ratio)
        per_level[n] = best
    ks = sorted(per_level)
    slope = float(np.polyfit(ks, [per_level[k] for k in ks], 1)[0]) \
        if len(ks) > 1 else 0.0
    return GrowthConstantReport(per_level, max(per_level.values()), slope, n_found)


@dataclass(frozen=True)
class SeparationResult:
    h: StepFunction | None   # violating sign vector, if any
    c: float                 # best nonnegative proportionality g ~ c f
    residual: float          # L1 residual of g - c f


def find_separating_sign_vector(f: StepFunction, g: StepFunction,
                                max_cells: int = 20, n_random: int = 2000,
                                seed: int = 0) -> SeparationResult:
    """Search h in {-1,1}^cells with (int hf)(int hg) < 0; exhaustive up to
    `max_cells` cells, randomized with greedy flips beyond."""
    m = max(f.level, g.level)
    fv, gv = f.refine(m).to_array(), g.refine(m).to_array()
    if np.abs(fv).sum() == 0:
        raise ValueError("need integral of |f| positive")
    n = len(fv)

    c = float(max((fv @ gv) / (fv @ fv), 0.0))
    residual = float(np.abs(gv - c * fv).mean())

    def result_from(h):
        return SeparationResult(StepFunction(m, tuple(h)), c, residual)

    if n <= max_cells:
        S = _sign_vectors(n)
        prods = (S @ fv) * (S @ gv) / n ** 2
        j = int(prods.argmin())
        if prods[j] < -1e-15:
            return result_from(S[j])
        return SeparationResult(None, c, residual)

    rng = np.random.Generator(np.random.PCG64(seed))
    best_h, best_val = None, 0.0
    for _ in range(n_random):
        h = rng.choice([-1.0, 1.0], size=n)
        improved = True
        while improved:
            improved = False
            hf, hg = float(h @ fv) / n, float(h @ gv) / n
            for i in range(n):
                dhf = hf - 2 * h[i] * fv[i] / n
                dhg = hg - 2 * h[i] * gv[i] / n
                if dhf * dhg < hf * hg:
                    h[i] = -h[i]
                    hf, hg = dhf, dhg
                    improved = True
        val = (float(h @ fv) / n) * (float(h @ gv) / n)
        if val < best_val:
            best_h, best_val = h.copy(), val
    if best_h is not None and best_val < -1e-15:
        return result_from(best_h)
    return SeparationResult(None, c, residual)
