"""Atomic measures, p-variation, and representing kernels.

The p-variation of an atomic measure (0 < p <= 1) is (sum |a_n|^p)^{1/p};
it is also the supremum of the dyadic-partition sums, attained at the first
level separating the atoms.  A finite sum of weighted-composition operators
carries one atomic measure per cell of its source refinement; integrating
the p-th power of its variation over [0,1] gives the functional driven
to at most 1 by the group-averaging experiment.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .dyadic import StepFunction, basis, cell_at, random_automorphism
from .norms import NormSpec, eval_norm
from .operators import (
    ElementaryOperator,
    PseudoIntegralOperator,
    apply,
    compose,
    is_isometry,
)


@dataclass(frozen=True)
class AtomicMeasure:
    """Finitely many atoms (position, weight); positions distinct dyadic
    rationals in [0,1], weights nonzero, sorted by |weight| nonincreasing."""

    atoms: tuple

    def __post_init__(self):
        atoms = []
        for pos, wt in self.atoms:
            pos = Fraction(pos)
            if not 0 <= pos <= 1:
                raise ValueError(f"atom position {pos} outside [0,1]")
            if pos.denominator & (pos.denominator - 1):
                raise ValueError(f"non-dyadic atom position {pos}")
            if wt == 0:
                raise ValueError("zero atom weight")
            atoms.append((pos, wt))
        if len({p for p, _ in atoms}) != len(atoms):
            raise ValueError("atom positions must be distinct")
        atoms.sort(key=lambda a: (-abs(float(a[1])), a[0]))
        object.__setattr__(self, "atoms", tuple(atoms))

    def total_mass_on(self, level: int) -> dict:
        """Cell index -> sum of weights of the atoms it contains (exact when
        the weights are rational)."""
        masses: dict = {}
        for pos, wt in self.atoms:
            k = cell_at(pos, level).index
            masses[k] = masses.get(k, 0) + wt
        return masses


def p_variation(mu: AtomicMeasure, p: float) -> float:
    """(sum |a_n|^p)^{1/p} for 0 < p <= 1."""
    if not 0 < p <= 1:
        raise ValueError(f"p = {p} outside (0, 1]")
    if not mu.atoms:
        return 0.0
    return math.fsum(abs(float(w)) ** p for _, w in mu.atoms) ** (1.0 / p)


def dyadic_p_variation(mu: AtomicMeasure, p: float, n_max: int) -> list:
    """Partition sums (sum_k |mu(D(n,k))|^p)^{1/p} for n = 0..n_max;
    nondecreasing in n, equal to the p-variation once atoms separate."""
    if not 0 < p <= 1:
        raise ValueError(f"p = {p} outside (0, 1]")
    out = []
    for n in range(n_max + 1):
        masses = mu.total_mass_on(n)
        s = math.fsum(abs(float(m)) ** p for m in masses.values() if m != 0)
        out.append(s ** (1.0 / p) if s > 0 else 0.0)
    return out


def separation_level(mu: AtomicMeasure) -> int:
    """Least n with every atom in its own dyadic cell."""
    n = 0
    while True:
        cells = [cell_at(pos, n).index for pos, _ in mu.atoms]
        if len(set(cells)) == len(cells):
            return n
        n += 1


@dataclass(frozen=True)
class RepresentingKernel:
    """One atomic measure per cell of the common source refinement; the
    operator acts by integrating against it."""

    level: int
    measures: tuple


def _as_pseudo(T) -> PseudoIntegralOperator:
    if isinstance(T, ElementaryOperator):
        return PseudoIntegralOperator((T,))
    return T


def kernel_of(T) -> RepresentingKernel:
    T = _as_pseudo(T)
    if not T.terms:
        return RepresentingKernel(0, (AtomicMeasure(()),))
    level = max(t.map.src_resolution for t in T.terms)
    per_cell = [[] for _ in range(2 ** level)]
    for term in T.terms:
        for (s, t), a in zip(term.map.pieces, term.multipliers):
            d = level - s.level
            for r in range(2 ** d):
                sc, tc = s.subcell(d, r), t.subcell(d, r)
                per_cell[sc.index - 1].append((tc.midpoint, a))
    measures = []
    for k, atoms in enumerate(per_cell):
        if len({p for p, _ in atoms}) != len(atoms):
            raise ValueError(f"kernel atoms collide on cell {k + 1}")
        measures.append(AtomicMeasure(tuple(atoms)))
    return RepresentingKernel(level, tuple(measures))


def kernel_functional(T, p: float) -> float:
    """Integral over [0,1] of the p-th power of the cellwise variation:
    sum over cells of length * sum |a|^p."""
    if not 0 < p <= 1:
        raise ValueError(f"p = {p} outside (0, 1]")
    ker = T if isinstance(T, RepresentingKernel) else kernel_of(T)
    ell = 2.0 ** -ker.level
    return math.fsum(ell * abs(float(w)) ** p
                     for mu in ker.measures for _, w in mu.atoms)


def isometry_mass(T: ElementaryOperator, p: float):
    """sum |a_i|^p length(src_i); exact Fraction when the multipliers are
    rational and p is a positive integer."""
    if float(p).is_integer() and all(isinstance(a, (int, Fraction))
                                     for a in T.multipliers):
        return sum(abs(Fraction(a)) ** int(p) * s.length
                   for (s, _), a in zip(T.map.pieces, T.multipliers))
    return math.fsum(abs(float(a)) ** p * float(s.length)
                     for (s, _), a in zip(T.map.pieces, T.multipliers))


def sup_level_functional(spec: NormSpec, T: ElementaryOperator, p: float) -> tuple:
    """||(sum_i |T e^n_i|^p)^{1/p}|| at the resolution where it saturates,
    and the norm of |a| it collapses to for a one-branch operator."""
    n = T.map.tgt_resolution
    cols = [apply(T, basis(n, i + 1)) for i in range(2 ** n)]
    lvl = max(c.level for c in cols)
    acc = np.zeros(2 ** lvl)
    for c in cols:
        acc += np.abs(c.refine(lvl).to_array()) ** p
    g = StepFunction(lvl, tuple(acc ** (1.0 / p)))
    mult = abs(T.multiplier_step())
    return eval_norm(spec, g), eval_norm(spec, mult)


@dataclass(frozen=True)
class KpReport:
    n_samples: int
    per_p: dict            # p -> (min, max, mean) of the kernel functional
    violations: int        # functionals above 1 + 1e-9
    refuted_compositions: int
    sup_functional: float  # saturated level functional of the base operator
    multiplier_norm: float


def kp_experiment(spec: NormSpec, T: ElementaryOperator, n_samples: int,
                  seed: int, p_list, group_level: int | None = None,
                  finer: int | None = None, tol: float = 1e-9) -> KpReport:
    """Sample group elements tau, form S = T V_tau T, certify, and check the
    kernel functional stays at most 1 for every p requested."""
    base = is_isometry(spec, T, seed=seed)
    if base.refuted:
        raise ValueError("operator is not an isometry for this norm "
                         f"(margin {base.margin:.3e})")
    N = group_level if group_level is not None else max(1, T.resolution)
    fin = finer if finer is not None else N + 2
    vals = {p: [] for p in p_list}
    refuted = 0
    violations = 0
    for i in range(n_samples):
        tau = random_automorphism(N, fin, seed=seed + i)
        V = ElementaryOperator(tau, (1,) * len(tau.pieces))
        S = compose(T, compose(V, T))
        cert = is_isometry(spec, S, seed=seed + i, n_random=40)
        if cert.refuted:
            refuted += 1
        for p in p_list:
            val = kernel_functional(S, p)
            vals[p].append(val)
            if val > 1 + tol:
                violations += 1
    per_p = {p: (min(v), max(v), sum(v) / len(v)) for p, v in vals.items()}
    sup_val, mult_val = sup_level_functional(spec, T, min(p_list))
    return KpReport(n_samples, per_p, violations, refuted, sup_val, mult_val)
