"""MAP inference: consensus ADMM plus a brute-force grid oracle.

The ADMM treats each ground hinge potential and each simplex constraint
as a local term with private copies of its atoms; the consensus step
averages copies and clips to [0, 1].  The returned assignment is
projected block-wise onto the simplex so it is exactly feasible.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import kernels
from .grounding import GroundProgram, energy, energy_by_pair
from .model import ATTACK, NEUTRAL, SUPPORT, ValidationError

LABEL_PRIORITY = (NEUTRAL, ATTACK, SUPPORT)  # tie-break, most conservative first
TIE_TOL = 1e-9


@dataclass(frozen=True)
class SolverParams:
    rho: float = 1.0
    eps_abs: float = 1e-5
    eps_rel: float = 1e-4
    max_iters: int = 25_000
    grid_resolution: float = 0.05

    def __post_init__(self):
        for name in ("rho", "eps_abs", "eps_rel", "max_iters", "grid_resolution"):
            if getattr(self, name) <= 0:
                raise ValidationError(f"solver parameter {name} must be positive")


@dataclass
class Assignment:
    values: np.ndarray  # per free atom
    labels: dict[str, str]  # pair_id -> predicted relation
    energy: float
    energy_shares: dict[str, float]
    iterations: int = 0
    primal_residual: float = 0.0
    dual_residual: float = 0.0
    converged: bool = True


def project_simplex(values) -> np.ndarray:
    """Euclidean projection onto {x >= 0, sum(x) = 1}."""
    v = np.asarray(values, dtype=float)
    return kernels.project_rows_numpy(v[None, :])[0]


def _predict_labels(program: GroundProgram, values: np.ndarray) -> dict[str, str]:
    labels = {}
    for block, pair_id in zip(program.blocks, program.block_pair_ids):
        atoms = [program.atoms[i] for i in block]
        vals = [values[i] for i in block]
        best = max(vals)
        chosen = None
        for rel in LABEL_PRIORITY:
            for atom, v in zip(atoms, vals):
                if atom.relation == rel and v >= best - TIE_TOL:
                    chosen = rel
                    break
            if chosen:
                break
        labels[pair_id] = chosen
    return labels


def _compile(program: GroundProgram):
    copy_atom: list[int] = []
    copy_pot: list[int] = []
    copy_coef: list[float] = []
    pot_ptr = [0]
    pot_const: list[float] = []
    pot_weight: list[float] = []
    pot_power: list[int] = []

    for pot in program.potentials:
        for idx, coef in pot.terms:
            copy_atom.append(idx)
            copy_pot.append(len(pot_const))
            copy_coef.append(coef)
        pot_ptr.append(len(copy_atom))
        pot_const.append(pot.const)
        pot_weight.append(pot.weight)
        pot_power.append(pot.power)
    for block in program.blocks:  # hard simplex constraints as indicator rows
        for idx in block:
            copy_atom.append(idx)
            copy_pot.append(len(pot_const))
            copy_coef.append(0.0)
        pot_ptr.append(len(copy_atom))
        pot_const.append(0.0)
        pot_weight.append(0.0)
        pot_power.append(0)

    return (np.array(copy_atom, dtype=np.int64),
            np.array(copy_pot, dtype=np.int64),
            np.array(copy_coef, dtype=float),
            np.array(pot_ptr, dtype=np.int64),
            np.array(pot_const, dtype=float),
            np.array(pot_weight, dtype=float),
            np.array(pot_power, dtype=np.int64))


def _finish(program: GroundProgram, raw_values: np.ndarray) -> np.ndarray:
    """Project each pair block exactly onto the simplex."""
    values = np.asarray(raw_values, dtype=float).copy()
    for block in program.blocks:
        idx = list(block)
        values[idx] = project_simplex(values[idx])
    return values


def solve_map_admm(program: GroundProgram, params: SolverParams = SolverParams(),
                   backend=None) -> Assignment:
    if program.n_atoms == 0:
        return Assignment(np.empty(0), {}, 0.0, {}, converged=True)
    arrays = _compile(program)
    z0 = np.full(program.n_atoms, 1.0 / len(program.blocks[0]))
    solve = backend or kernels.solve_admm
    z, iters, r_norm, s_norm, converged, nan_seen = solve(
        *arrays, program.n_atoms, z0, params.rho, params.eps_abs,
        params.eps_rel, params.max_iters)
    if nan_seen:
        raise FloatingPointError("ADMM produced NaN iterates")
    values = _finish(program, z)
    total = energy(program, values)
    return Assignment(
        values=values,
        labels=_predict_labels(program, values),
        energy=total,
        energy_shares=energy_by_pair(program, values),
        iterations=int(iters),
        primal_residual=float(r_norm),
        dual_residual=float(s_norm),
        converged=bool(converged),
    )


# ---------------------------------------------------------------------------
# brute-force grid oracle

MAX_GRID_PAIRS = 3


def simplex_grid(k: int, resolution: float) -> np.ndarray:
    """All points of the k-simplex with coordinates on a uniform grid,
    in ascending lexicographic order."""
    steps = int(round(1.0 / resolution))
    points = []

    def rec(prefix, remaining, slots):
        if slots == 1:
            points.append(prefix + [remaining])
            return
        for i in range(remaining + 1):
            rec(prefix + [i], remaining - i, slots - 1)

    rec([], steps, k)
    return np.array(points, dtype=float) / steps


def solve_map_grid(program: GroundProgram, resolution: float = 0.05) -> Assignment:
    """Exhaustive minimization over discretized simplices.

    Independent of the ADMM path: evaluates every grid assignment's
    energy by tensor accumulation.  Guarded to small programs; ties
    resolve to the lexicographically first grid point.
    """
    nb = program.n_pairs
    if nb == 0:
        return Assignment(np.empty(0), {}, 0.0, {}, converged=True)
    if nb > MAX_GRID_PAIRS:
        raise ValidationError(
            f"grid oracle limited to {MAX_GRID_PAIRS} pairs, got {nb}")
    k = len(program.blocks[0])
    grid = simplex_grid(k, resolution)
    n_points = len(grid)

    atom_block = {}
    atom_pos = {}
    for b, block in enumerate(program.blocks):
        for pos, idx in enumerate(block):
            atom_block[idx] = b
            atom_pos[idx] = pos

    total = np.zeros([n_points] * nb)
    for pot in program.potentials:
        expr = np.full([1] * nb, pot.const)
        for idx, coef in pot.terms:
            b = atom_block[idx]
            shape = [1] * nb
            shape[b] = n_points
            expr = expr + coef * grid[:, atom_pos[idx]].reshape(shape)
        total = total + pot.weight * np.maximum(expr, 0.0) ** pot.power

    flat = int(np.argmin(total.reshape(-1)))
    choice = np.unravel_index(flat, total.shape)
    values = np.empty(program.n_atoms)
    for b, block in enumerate(program.blocks):
        values[list(block)] = grid[choice[b]]
    return Assignment(
        values=values,
        labels=_predict_labels(program, values),
        energy=energy(program, values),
        energy_shares=energy_by_pair(program, values),
        converged=True,
    )
