"""Rearrangement-invariant norms on dyadic step functions.

Three families, each normalized so the constant-one function has norm 1:
Lp (1 <= p <= inf), Lorentz with a nonincreasing weight vector (second index
fixed to 1), and Orlicz via a tabulated Young function with the Luxemburg
gauge.  Also the dual norm, conditional expectation, fundamental function,
and the two-cell strict-monotonicity tests that feed the classifier.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .dyadic import StepFunction, basis, prefix_indicator


def _as_fraction(x) -> Fraction:
    """Exact coercion; floats go through str(), so 0.4 becomes 2/5."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, (str, float)):
        return Fraction(str(x))
    raise TypeError(f"cannot coerce {type(x)} to an exact rational")


@dataclass(frozen=True)
class LpNorm:
    p: float  # 1 <= p <= math.inf

    def __post_init__(self):
        if not (self.p == math.inf or 1 <= self.p):
            raise ValueError(f"Lp exponent {self.p} outside [1, inf]")


@dataclass(frozen=True)
class LorentzNorm:
    """Weighted sum of the decreasing rearrangement; weights W_1 >= ... > 0
    sum to 1 exactly and refine to finer levels by equal splitting."""

    level: int
    weights: tuple

    def __post_init__(self):
        w = tuple(_as_fraction(x) for x in self.weights)
        object.__setattr__(self, "weights", w)
        if len(w) != 2 ** self.level:
            raise ValueError(f"need {2 ** self.level} weights at level {self.level}")
        if any(a < b for a, b in zip(w, w[1:])) or w[-1] <= 0:
            raise ValueError("weights must be nonincreasing and positive")
        if sum(w) != 1:
            raise ValueError(f"weights sum to {sum(w)} != 1")


@dataclass(frozen=True)
class OrliczNorm:
    """Luxemburg gauge of a piecewise-linear Young function given by samples
    (xs, ys); the table is rescaled at construction so phi(1) = 1."""

    xs: tuple
    ys: tuple

    def __post_init__(self):
        xs = tuple(float(x) for x in self.xs)
        ys = tuple(float(y) for y in self.ys)
        if len(xs) != len(ys) or len(xs) < 2:
            raise ValueError("need matching sample tables with >= 2 points")
        if xs[0] != 0.0 or ys[0] != 0.0:
            raise ValueError("table must start at (0, 0)")
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise ValueError("x samples must be strictly increasing")
        slopes = [(ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]) for i in range(len(xs) - 1)]
        if any(s < -1e-15 for s in slopes) or any(
                b < a - 1e-12 for a, b in zip(slopes, slopes[1:])):
            raise ValueError("table must be convex nondecreasing")
        if xs[-1] < 1:
            raise ValueError("table must cover x = 1")
        scale = float(np.interp(1.0, xs, ys))
        if scale <= 0:
            raise ValueError("phi(1) must be positive")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", tuple(y / scale for y in ys))

    def phi(self, x: np.ndarray) -> np.ndarray:
        """Linear interpolation, linear extrapolation past the last sample."""
        x = np.asarray(x, dtype=float)
        out = np.interp(x, self.xs, self.ys)
        over = x > self.xs[-1]
        if np.any(over):
            slope = (self.ys[-1] - self.ys[-2]) / (self.xs[-1] - self.xs[-2])
            out = np.where(over, self.ys[-1] + slope * (x - self.xs[-1]), out)
        return out

    def phi_slope(self, x: np.ndarray) -> np.ndarray:
        """Right-derivative of the interpolant (for ascent directions)."""
        x = np.asarray(x, dtype=float)
        idx = np.clip(np.searchsorted(self.xs, x, side="right") - 1, 0, len(self.xs) - 2)
        xs, ys = np.asarray(self.xs), np.asarray(self.ys)
        return (ys[idx + 1] - ys[idx]) / (xs[idx + 1] - xs[idx])


NormSpec = LpNorm | LorentzNorm | OrliczNorm


def lp(p) -> LpNorm:
    return LpNorm(float(p))


def lorentz(level: int, weights) -> LorentzNorm:
    return LorentzNorm(level, tuple(weights))


def quadratic_orlicz(upper: float = 4.0, step: float = 0.25) -> OrliczNorm:
    xs = np.arange(0.0, upper + step / 2, step)
    return OrliczNorm(tuple(xs), tuple(xs ** 2))


def min_level(spec: NormSpec) -> int:
    return spec.level if isinstance(spec, LorentzNorm) else 0


@lru_cache(maxsize=256)
def _refined_lorentz_weights(spec: LorentzNorm, level: int):
    split = 2 ** (level - spec.level)
    exact = tuple(w / split for w in spec.weights for _ in range(split))
    return exact, np.array([float(w) for w in exact])


def decreasing_rearrangement(f: StepFunction) -> StepFunction:
    return StepFunction(f.level, tuple(sorted((abs(v) for v in f.values), reverse=True)))


def _is_exact(values) -> bool:
    return all(isinstance(v, (int, Fraction)) for v in values)


def eval_norm(spec: NormSpec, f: StepFunction) -> float:
    f = f.refine(max(f.level, min_level(spec)))
    n = len(f.values)
    if isinstance(spec, LpNorm):
        if spec.p == math.inf:
            return float(max(abs(v) for v in f.values))
        if spec.p == 1:
            if _is_exact(f.values):
                return float(sum(abs(v) for v in f.values) / Fraction(n))
            return math.fsum(abs(v) for v in f.values) / n
        if _is_exact(f.values) and float(spec.p).is_integer():
            p = int(spec.p)
            return float(sum(abs(v) ** p for v in f.values) / Fraction(n)) ** (1.0 / p)
        s = math.fsum(abs(float(v)) ** spec.p for v in f.values) / n
        return s ** (1.0 / spec.p)
    if isinstance(spec, LorentzNorm):
        exact_w, float_w = _refined_lorentz_weights(spec, f.level)
        if _is_exact(f.values):
            star = sorted((abs(v) for v in f.values), reverse=True)
            return float(sum(v * w for v, w in zip(star, exact_w)))
        star = np.sort(np.abs(f.to_array()))[::-1]
        return float(star @ float_w)
    if isinstance(spec, OrliczNorm):
        return _luxemburg(spec, f)
    raise TypeError(f"unknown norm spec {spec!r}")


def _luxemburg(spec: OrliczNorm, f: StepFunction,
               abs_tol: float = 1e-12, max_iter: int = 200) -> float:
    v = np.abs(f.to_array())
    if not v.any():
        return 0.0
    n = v.size
    upper_x = spec.xs[-1]
    l1, linf = float(v.sum() / n), float(v.max())
    lo, hi = l1 / upper_x, linf * upper_x

    def mean_phi(lam):
        return float(spec.phi(v / lam).sum() / n)

    if mean_phi(hi) > 1 + 1e-9 or mean_phi(lo) < 1 - 1e-9:
        raise ArithmeticError("Luxemburg bisection failed to bracket (malformed table)")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mean_phi(mid) > 1:
            lo = mid
        else:
            hi = mid
        if hi - lo < abs_tol:
            break
    return hi


def norm_array(spec: NormSpec, v: np.ndarray, level: int) -> float:
    """eval_norm on a float value array (fast path for optimizer loops)."""
    v = np.asarray(v, dtype=float)
    if isinstance(spec, LpNorm):
        if spec.p == math.inf:
            return float(np.abs(v).max())
        return float((np.abs(v) ** spec.p).mean() ** (1.0 / spec.p))
    if isinstance(spec, LorentzNorm):
        _, w = _refined_lorentz_weights(spec, level)
        return float(np.sort(np.abs(v))[::-1] @ w)
    if isinstance(spec, OrliczNorm):
        return _luxemburg(spec, StepFunction(level, tuple(v)))
    raise TypeError(f"unknown norm spec {spec!r}")


def norming_direction(spec: NormSpec, v: np.ndarray, level: int) -> np.ndarray:
    """A supporting direction q of the norm at v: <q, dv> grows the norm
    fastest up to scaling.  Used as an ascent subgradient; scale-free."""
    v = np.asarray(v, dtype=float)
    a = np.abs(v)
    sgn = np.where(v >= 0, 1.0, -1.0)
    if isinstance(spec, LpNorm):
        if spec.p == math.inf:
            q = np.zeros_like(v)
            j = int(a.argmax())
            q[j] = sgn[j]
            return q
        if spec.p == 1:
            return sgn
        return sgn * a ** (spec.p - 1)
    if isinstance(spec, LorentzNorm):
        _, w = _refined_lorentz_weights(spec, level)
        order = np.argsort(-a, kind="stable")
        q = np.zeros_like(v)
        q[order] = w
        return q * sgn
    if isinstance(spec, OrliczNorm):
        lam = _luxemburg(spec, StepFunction(level, tuple(v)))
        if lam == 0:
            return sgn
        return sgn * spec.phi_slope(a / lam)
    raise TypeError(f"unknown norm spec {spec!r}")


def norm_columns(spec: NormSpec, V: np.ndarray, level: int) -> np.ndarray:
    """Norms of every column of V (vectorized over candidate witnesses)."""
    V = np.asarray(V, dtype=float)
    if isinstance(spec, LpNorm):
        if spec.p == math.inf:
            return np.abs(V).max(axis=0)
        return (np.abs(V) ** spec.p).mean(axis=0) ** (1.0 / spec.p)
    if isinstance(spec, LorentzNorm):
        _, w = _refined_lorentz_weights(spec, level)
        return w @ np.sort(np.abs(V), axis=0)[::-1]
    if isinstance(spec, OrliczNorm):
        return np.array([norm_array(spec, V[:, j], level) for j in range(V.shape[1])])
    raise TypeError(f"unknown norm spec {spec!r}")


def conditional_expectation(f: StepFunction, level: int) -> StepFunction:
    """Average over each level-`level` cell; exact on rational values."""
    if level > f.level:
        raise ValueError(f"cannot project level {f.level} onto finer level {level}")
    block = 2 ** (f.level - level)
    vals = tuple(sum(f.values[i * block:(i + 1) * block], start=Fraction(0)) / Fraction(block)
                 for i in range(2 ** level))
    return StepFunction(level, vals)


def _project_decreasing(v: np.ndarray) -> np.ndarray:
    """Euclidean projection onto the nonincreasing cone, clipped at 0 (PAVA)."""
    blocks = []
    for x in v:
        s, c = float(x), 1
        while blocks and blocks[-1][0] * c < s * blocks[-1][1]:
            ps, pc = blocks.pop()
            s += ps
            c += pc
        blocks.append((s, c))
    out = np.empty(len(v))
    i = 0
    for s, c in blocks:
        out[i:i + c] = s / c
        i += c
    return np.maximum(out, 0.0)


class DualNormDidNotConverge(RuntimeError):
    def __init__(self, best_lower, last_improvement):
        super().__init__(f"dual-norm ascent stalled at {best_lower} "
                         f"(last improvement {last_improvement})")
        self.best_lower = best_lower
        self.last_improvement = last_improvement


def dual_norm(spec: NormSpec, g: StepFunction, tol: float = 1e-10,
              seed: int = 0, n_starts: int = 16, n_steps: int = 500) -> float:
    """sup { integral of f*g : ||f|| <= 1 }.

    The supremum is attained at a nonnegative nonincreasing f paired against
    the decreasing rearrangement of |g|; Lp is answered by the conjugate
    exponent, the Lorentz polytope by its prefix vertices, and Orlicz by
    projected ascent over the decreasing cone seeded at those vertices.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if isinstance(spec, LpNorm):
        if spec.p == math.inf:
            conj = lp(1)
        elif spec.p == 1:
            conj = lp(math.inf)
        else:
            conj = lp(spec.p / (spec.p - 1))
        return eval_norm(conj, g)

    g = g.refine(max(g.level, min_level(spec)))
    gs = np.sort(np.abs(g.to_array()))[::-1]
    n = gs.size
    if not gs.any():
        return 0.0
    csum = np.cumsum(gs) / n

    best = 0.0
    prefix_norms = []
    for k in range(1, n + 1):
        pk = eval_norm(spec, StepFunction(g.level, (1,) * k + (0,) * (n - k)))
        prefix_norms.append(pk)
        best = max(best, float(csum[k - 1]) / pk)
    if isinstance(spec, LorentzNorm):
        return best  # polytope ball: prefix vertices are exact

    def normalize(f):
        nrm = eval_norm(spec, StepFunction(g.level, tuple(f)))
        return (f / nrm, float(f @ gs) / n / nrm) if nrm > 0 else (f, 0.0)

    rng = np.random.Generator(np.random.PCG64(seed))
    starts = [np.ones(n)]
    order = np.argsort([-float(csum[k - 1]) / prefix_norms[k - 1] for k in range(1, n + 1)])
    for k in order[:4]:
        starts.append(np.array([1.0] * (k + 1) + [0.0] * (n - k - 1)))
    starts.append(gs.copy() + 1e-12)
    while len(starts) < n_starts:
        starts.append(_project_decreasing(rng.random(n)))

    stalled = 0.0
    for f0 in starts:
        f = _project_decreasing(f0)
        if not f.any():
            continue
        f, cur = normalize(f)
        step, converged = 1.0, False
        for _ in range(n_steps):
            cand = _project_decreasing(f + step * gs)
            if cand.any():
                cand, new = normalize(cand)
            else:
                new = 0.0
            if new > cur:
                gain, f, cur = new - cur, cand, new
                step = min(step * 1.5, 1e3)
                if gain < 1e-3 * tol * max(cur, 1.0):
                    converged = True
                    break
            else:
                step *= 0.5
                if step < 1e-13:
                    converged = True
                    break
        if not converged:
            stalled = max(stalled, gain)
        best = max(best, cur)
    if stalled > tol:
        raise DualNormDidNotConverge(best, stalled)
    return best


@dataclass(frozen=True)
class PropertyWitness:
    holds: bool
    worst_t: float
    worst_margin: float


DEFAULT_T_GRID = tuple(2.0 ** -k for k in range(0, 11)) + (1.5, 2.0, 4.0)


def _two_cell_margin(norm_of, t: float) -> float:
    lvl = 1
    e1 = basis(1, 1)
    return norm_of(StepFunction(lvl, (1, t))) - norm_of(e1)


def check_property_P(spec: NormSpec, t_grid=DEFAULT_T_GRID,
                     margin_tol: float = 1e-10) -> PropertyWitness:
    """Strict growth of t -> ||e11 + t e12|| above ||e11|| on the grid."""
    if not t_grid or any(t <= 0 for t in t_grid):
        raise ValueError("t_grid must be nonempty and positive")
    worst_t, worst = None, math.inf
    for t in t_grid:
        m = _two_cell_margin(lambda h: eval_norm(spec, h), float(t))
        if m < worst:
            worst_t, worst = float(t), m
    return PropertyWitness(worst > margin_tol, worst_t, worst)


def check_property_P_prime(spec: NormSpec, t_grid=DEFAULT_T_GRID,
                           margin_tol: float = 1e-10,
                           dual_tol: float = 1e-10) -> PropertyWitness:
    """Same test evaluated through the dual norm."""
    if not t_grid or any(t <= 0 for t in t_grid):
        raise ValueError("t_grid must be nonempty and positive")
    worst_t, worst = None, math.inf
    for t in t_grid:
        m = _two_cell_margin(lambda h: dual_norm(spec, h, tol=dual_tol), float(t))
        if m < worst:
            worst_t, worst = float(t), m
    return PropertyWitness(worst > margin_tol, worst_t, worst)


def fundamental_function(spec: NormSpec, t, level_cap: int = 20) -> float:
    """||chi_[0,t]|| at the minimal sufficient level, t a dyadic rational."""
    t = Fraction(t)
    den = t.denominator
    if den & (den - 1):
        raise ValueError(f"non-dyadic t = {t}")
    if den > 2 ** level_cap:
        raise ValueError(f"t = {t} finer than the level cap {level_cap}")
    lvl = max(den.bit_length() - 1, min_level(spec))
    return eval_norm(spec, prefix_indicator(t, lvl))


def parse_norm_spec(text: str) -> NormSpec:
    """`lp <p>` | `lp inf` | `lorentz <L> <W_1> ...` | `orlicz <n> <x1> <y1> ...`"""
    toks = text.replace(",", " ").split()
    if not toks:
        raise ValueError("empty norm spec")
    kind = toks[0].lower()
    if kind == "lp":
        return lp(math.inf if toks[1].lower() in ("inf", "infinity") else float(toks[1]))
    if kind == "lorentz":
        level = int(toks[1])
        return lorentz(level, tuple(Fraction(t) for t in toks[2:]))
    if kind == "orlicz":
        n = int(toks[1])
        vals = [float(t) for t in toks[2:]]
        if len(vals) != 2 * n:
            raise ValueError(f"orlicz table needs {2 * n} numbers, got {len(vals)}")
        return OrliczNorm(tuple(vals[0::2]), tuple(vals[1::2]))
    raise ValueError(f"unknown norm spec kind {kind!r}")


def format_norm_spec(spec: NormSpec) -> str:
    if isinstance(spec, LpNorm):
        return "lp inf" if spec.p == math.inf else f"lp {spec.p:g}"
    if isinstance(spec, LorentzNorm):
        return f"lorentz {spec.level} " + " ".join(str(w) for w in spec.weights)
    if isinstance(spec, OrliczNorm):
        pairs = " ".join(f"{x:g} {y:g}" for x, y in zip(spec.xs, spec.ys))
        return f"orlicz {len(spec.xs)} {pairs}"
    raise TypeError(f"unknown norm spec {spec!r}")


def builtin_specs() -> dict:
    """The spec zoo every cross-norm experiment runs over."""
    return {
        "lp1": lp(1),
        "lp2": lp(2),
        "lp4": lp(4),
        "lpinf": lp(math.inf),
        "lorentz": lorentz(2, (Fraction(2, 5), Fraction(3, 10),
                               Fraction(1, 5), Fraction(1, 10))),
        "orlicz": quadratic_orlicz(),
    }
