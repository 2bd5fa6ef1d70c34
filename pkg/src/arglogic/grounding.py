"""Grounding rule templates into hinge potentials over relation atoms.

Every ground potential's distance to satisfaction is a linear hinge
max(0, a.x + c) over the free atoms of its component; observed predicate
values are folded into the constant.  Each pair contributes one hard
simplex block tying its relation atoms to sum to 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .chains import ChainTriple
from .model import ArgumentPair, ValidationError, labels_for_mode
from .predicates import PredicateVector
from .rules import Rule

FEAS_TOL = 1e-6


@dataclass(frozen=True)
class Atom:
    pair_id: str
    relation: str


@dataclass(frozen=True)
class GroundPotential:
    rule_id: str
    weight: float
    power: int  # 1 or 2
    terms: tuple[tuple[int, float], ...]  # (atom index, coefficient)
    const: float
    pair_id: str  # pair the potential is attributed to (its head's pair)

    def distance(self, values: np.ndarray) -> float:
        s = self.const
        for idx, coef in self.terms:
            s += coef * values[idx]
        return max(0.0, s)


@dataclass
class GroundProgram:
    task_mode: str
    atoms: list[Atom] = field(default_factory=list)
    atom_index: dict[Atom, int] = field(default_factory=dict)
    blocks: list[tuple[int, ...]] = field(default_factory=list)  # simplex per pair
    block_pair_ids: list[str] = field(default_factory=list)
    potentials: list[GroundPotential] = field(default_factory=list)

    @property
    def n_atoms(self) -> int:
        return len(self.atoms)

    @property
    def n_pairs(self) -> int:
        return len(self.blocks)

    @property
    def total_weight(self) -> float:
        return sum(p.weight for p in self.potentials)

    def add_pair_atoms(self, pair_id: str) -> tuple[int, ...]:
        idxs = []
        for rel in labels_for_mode(self.task_mode):
            atom = Atom(pair_id, rel)
            self.atom_index[atom] = len(self.atoms)
            idxs.append(len(self.atoms))
            self.atoms.append(atom)
        block = tuple(idxs)
        self.blocks.append(block)
        self.block_pair_ids.append(pair_id)
        return block

    def index_of(self, pair_id: str, relation: str) -> int:
        return self.atom_index[Atom(pair_id, relation)]


def distance_to_satisfaction(body_values: Sequence[float], head_value: float) -> float:
    """Hinge distance of a soft implication under Lukasiewicz semantics."""
    return max(0.0, sum(body_values) - (len(body_values) - 1) - head_value)


def ground(
    rules: list[Rule],
    pairs: Iterable[ArgumentPair],
    predicate_vectors: dict[str, PredicateVector],
    triples: Sequence[ChainTriple] = (),
    power: int = 1,
    prior_on_indirect: bool = True,
    task_mode: str = "ternary",
) -> GroundProgram:
    """Instantiate the rules over one set of pairs (typically a component).

    For each pair and each single-body rule whose predicate value is
    present, the observed body is inlined:  d = max(0, value - head).
    Chain rules ground once per triple over six free atoms.  The default
    prior grounds as d = 1 - default_atom, and the simplex constraint is
    structural (one block per pair).
    """
    program = GroundProgram(task_mode=task_mode)
    pair_list = sorted(pairs, key=lambda p: p.pair_id)
    pair_ids = {p.pair_id for p in pair_list}
    for pair in pair_list:
        program.add_pair_atoms(pair.pair_id)

    logic_rules = [r for r in rules if r.id.startswith("R") and len(r.body) == 1]
    chain_rules = [r for r in rules if r.id.startswith("R") and len(r.body) == 2]
    prior = next((r for r in rules if r.id == "C1"), None)

    for pair in pair_list:
        vector = predicate_vectors.get(pair.pair_id)
        values = vector.present() if vector is not None else {}
        for rule in logic_rules:
            value = values.get(rule.body[0])
            if value is None or rule.weight == 0.0:
                continue
            head_idx = program.index_of(pair.pair_id, rule.head)
            program.potentials.append(GroundPotential(
                rule.id, rule.weight, power,
                terms=((head_idx, -1.0),), const=float(value),
                pair_id=pair.pair_id))
        if prior is not None and prior.weight > 0.0:
            if pair.kind == "indirect" and not prior_on_indirect:
                continue
            head_idx = program.index_of(pair.pair_id, prior.head)
            program.potentials.append(GroundPotential(
                "C1", prior.weight, power,
                terms=((head_idx, -1.0),), const=1.0,
                pair_id=pair.pair_id))

    if chain_rules:
        for triple in triples:
            for pid in (triple.first_hop, triple.second_hop, triple.outer_pair):
                if pid not in pair_ids:
                    raise ValidationError(
                        f"chain triple references pair {pid!r} outside the program")
            for rule in chain_rules:
                if rule.weight == 0.0:
                    continue
                b1 = program.index_of(triple.first_hop, rule.body[0])
                b2 = program.index_of(triple.second_hop, rule.body[1])
                head = program.index_of(triple.outer_pair, rule.head)
                program.potentials.append(GroundPotential(
                    rule.id, rule.weight, power,
                    terms=((b1, 1.0), (b2, 1.0), (head, -1.0)), const=-1.0,
                    pair_id=triple.outer_pair))

    return program


def check_feasible(program: GroundProgram, values: np.ndarray, tol: float = FEAS_TOL):
    values = np.asarray(values, dtype=float)
    if values.shape != (program.n_atoms,):
        raise ValidationError(
            f"assignment has {values.shape} values, expected {program.n_atoms}")
    if np.any(values < -tol) or np.any(values > 1 + tol):
        raise ValidationError("assignment violates [0, 1] bounds")
    for block in program.blocks:
        total = float(sum(values[i] for i in block))
        if abs(total - 1.0) > tol:
            raise ValidationError(
                f"simplex constraint violated: block sums to {total:.8f}")


def energy(program: GroundProgram, values: np.ndarray) -> float:
    """Total weighted hinge loss; raises if the assignment is infeasible."""
    check_feasible(program, values)
    values = np.asarray(values, dtype=float)
    total = 0.0
    for pot in program.potentials:
        total += pot.weight * pot.distance(values) ** pot.power
    return total


def energy_by_pair(program: GroundProgram, values: np.ndarray) -> dict[str, float]:
    values = np.asarray(values, dtype=float)
    shares: dict[str, float] = {pid: 0.0 for pid in program.block_pair_ids}
    for pot in program.potentials:
        shares[pot.pair_id] += pot.weight * pot.distance(values) ** pot.power
    return shares
