"""Steinberg presentations with the roots of a subspace ``V`` removed.

Generators are ``x_alpha`` for roots outside ``V``; the missing root
elements are rebuilt as commutators through a neighbor outside ``V``.
All identities are checked by matrix evaluation.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .errors import HypothesisNotMet, InvalidWitness, NoWitness
from .linalg import Subspace, rref
from .report import Check, VerificationReport
from .rootsys import cone_coefficients, is_k_small, neighbor_table, reflect
from .steingrp import (Letter, SteinbergWord, commutator_word, eval_equal,
                       st_evaluate)


def _neg(r):
    return tuple(-x for x in r)


def cone_meets(V: Subspace, alpha, beta) -> bool:
    """Whether ``(R>=0 alpha + R>=0 beta) ∩ V`` contains a nonzero vector."""
    alpha, beta = tuple(alpha), tuple(beta)
    plane = Subspace.span([alpha, beta], V.n)
    if plane.dim == 1:
        # beta is a positive multiple of alpha (anti-parallel pairs never get here)
        return alpha in V
    meet = plane.intersect(V)
    if meet.dim == 0:
        return False
    if meet.dim == 2:
        return True
    v = meet.rows[0]
    # write v = a alpha + b beta
    red, piv = rref([[alpha[i], beta[i], v[i]] for i in range(V.n)], 3)
    a, b = Fraction(0), Fraction(0)
    for row, p in zip(red, piv):
        if p == 0:
            a = row[2]
        elif p == 1:
            b = row[2]
    return (a >= 0 and b >= 0) or (a <= 0 and b <= 0)


@dataclass
class EliminatedPresentation:
    pinning: object
    V: Subspace

    def __post_init__(self):
        phi = self.pinning.phi
        self.eliminated = tuple(r for r in self.pinning.order if r in self.V)
        self.generators = tuple(r for r in self.pinning.order if r not in self.V)
        gens = set(self.generators)
        self.commutator_pairs = tuple(
            (a, b) for a, b in itertools.product(self.generators, repeat=2)
            if a != _neg(b) and a in gens and b in gens and not cone_meets(self.V, a, b))
        self.phi = phi
        self.vset = frozenset(self.eliminated)
        self.nbrs = neighbor_table(phi)

    def to_dict(self):
        return {"V": self.V.to_dict(), "generators": [list(r) for r in self.generators],
                "eliminated": [list(r) for r in self.eliminated],
                "commutator_relations": len(self.commutator_pairs)}

    def include(self, w: SteinbergWord) -> SteinbergWord:
        """``F_V^0``: a word in the eliminated generators read in the full presentation."""
        for l in w:
            if l.root in self.V:
                raise InvalidWitness(f"letter on {l.root} is not an eliminated-presentation generator")
        return w


def build_eliminated(pinning, V) -> EliminatedPresentation:
    if not isinstance(V, Subspace):
        V = Subspace.span(V, pinning.phi.dim) if V else Subspace.zero(pinning.phi.dim)
    return EliminatedPresentation(pinning, V)


def composite_root_morphism(ep: EliminatedPresentation, alpha, beta, p, q) -> SteinbergWord:
    """``x_alpha^beta(p, q) = [x_beta(p), x_{s_beta(alpha)}(q)]`` times the correction
    letters ``x_gamma(-f^gamma(p, q))`` for the other roots of the commutator."""
    pin = ep.pinning
    alpha, beta = tuple(alpha), tuple(beta)
    if alpha not in ep.vset:
        raise InvalidWitness(f"{alpha} is not an eliminated root")
    if beta in ep.vset or beta not in ep.nbrs[alpha]:
        raise InvalidWitness(f"{beta} is not a neighbor of {alpha} outside V")
    other = reflect(beta, alpha)
    V = pin.values()
    w = commutator_word(SteinbergWord(pin, [Letter(beta, p)]), SteinbergWord(pin, [Letter(other, q)]))
    correction = [Letter(g, V.neg(v)) for g, v in pin.f_terms(beta, other, p, q) if g != alpha]
    correction.sort(key=lambda l: pin.position[l.root])
    for l in correction:
        if l.root in ep.vset:
            raise InvalidWitness(f"correction root {l.root} lies in V")
    return w * SteinbergWord(pin, correction)


def witness_neighbor(ep: EliminatedPresentation, alpha):
    """First neighbor of ``alpha`` outside ``V`` whose structure map reaches ``alpha``."""
    pin = ep.pinning
    for beta in pin.order:
        if beta in ep.vset or beta not in ep.nbrs[alpha]:
            continue
        if (beta, reflect(beta, alpha)) in pin.signs:
            return beta
    return None


def express_eliminated_generator(ep: EliminatedPresentation, alpha, p) -> SteinbergWord:
    """A word in the eliminated generators evaluating to ``t_alpha(p)``."""
    pin = ep.pinning
    alpha = tuple(alpha)
    if alpha not in ep.vset:
        return SteinbergWord(pin, [Letter(alpha, p)])
    V = pin.values()
    if V.is_zero(p):
        return SteinbergWord(pin, [])
    beta = witness_neighbor(ep, alpha)
    if beta is None:
        raise NoWitness(f"no neighbor of {alpha} outside V")
    e = V.one()
    q = pin.solve_f(beta, reflect(beta, alpha), e, p)
    return composite_root_morphism(ep, alpha, beta, e, q)


def _image(ep, root, value):
    return express_eliminated_generator(ep, root, value)


def verify_elim_identities(ep: EliminatedPresentation, values=None, battery: str = "bij") -> VerificationReport:
    """Witness-level checks for the eliminated presentation.

    ``battery="sur"`` needs a 1-small ``V`` and checks the round trip;
    ``battery="bij"`` needs a 2-small ``V`` and adds additivity of the
    composite morphisms, the structure-map associativity identity and the
    commutator relations whose cone avoids the roots of ``V``.
    """
    pin = ep.pinning
    phi = pin.phi
    need = 1 if battery == "sur" else 2
    if not is_k_small(phi, ep.V, need):
        raise HypothesisNotMet(f"V is not {need}-small")
    V = pin.values()
    vals = values if values is not None else V.elements()
    report = VerificationReport(f"elimination_{battery}", {"pinning": pin.to_dict(), "V": ep.V.to_dict()})
    report.data = {"generators": len(ep.generators), "eliminated": len(ep.eliminated)}

    bad, n = [], 0
    for alpha in ep.eliminated:
        for p in vals:
            n += 1
            try:
                w = ep.include(express_eliminated_generator(ep, alpha, p))
            except NoWitness as exc:
                bad.append({"alpha": alpha, "p": p, "error": str(exc)})
                continue
            if not eval_equal(st_evaluate(w), pin.t(alpha, p), pin):
                bad.append({"alpha": alpha, "p": p, "word": w.to_dict()})
    for alpha in ep.generators:
        for p in vals:
            n += 1
            w = express_eliminated_generator(ep, alpha, p)
            if [(l.root, l.value) for l in w] != ([(alpha, V.normalize(p))] if not V.is_zero(p) else []):
                bad.append({"alpha": alpha, "p": p, "reason": "generator not returned as itself"})
    report.add(Check.from_failures("round_trip", n, bad))
    if battery == "sur":
        return report

    # (i) additivity of x_alpha^beta in the second argument
    bad, n = [], 0
    for alpha in ep.eliminated:
        for beta in sorted(ep.nbrs[alpha]):
            if beta in ep.vset or (beta, reflect(beta, alpha)) not in pin.signs:
                continue
            for p, q, r in itertools.product(vals, repeat=3):
                n += 1
                lhs = composite_root_morphism(ep, alpha, beta, p, V.add(q, r))
                rhs = composite_root_morphism(ep, alpha, beta, p, q) * composite_root_morphism(ep, alpha, beta, p, r)
                if not eval_equal(st_evaluate(lhs), st_evaluate(rhs), pin):
                    bad.append({"alpha": alpha, "beta": beta, "p": p, "q": q, "q'": r})
    report.add(Check.from_failures("composite_additive", n, bad))

    # (ii) f_{g, s_g a}(p, f_{s_g b, s_b a}(q, r)) = f_{b, s_b a}(f_{g, s_g b}(p, q), r)
    bad, n = [], 0
    for alpha in ep.eliminated:
        for beta in sorted(ep.nbrs[alpha]):
            if beta in ep.vset:
                continue
            for gamma in sorted(ep.nbrs[alpha]):
                if gamma in ep.vset or gamma == beta:
                    continue
                sga, sgb, sba = reflect(gamma, alpha), reflect(gamma, beta), reflect(beta, alpha)
                keys = [(gamma, sga), (sgb, sba), (beta, sba), (gamma, sgb)]
                if any(k not in pin.signs for k in keys):
                    continue
                for p, q, r in itertools.product(vals, repeat=3):
                    n += 1
                    (_, inner), = pin.f_terms(sgb, sba, q, r)
                    (_, lhs), = pin.f_terms(gamma, sga, p, inner)
                    (_, inner2), = pin.f_terms(gamma, sgb, p, q)
                    (_, rhs), = pin.f_terms(beta, sba, inner2, r)
                    wl = composite_root_morphism(ep, alpha, gamma, p, inner)
                    wr = composite_root_morphism(ep, alpha, beta, inner2, r)
                    if not V.eq(lhs, rhs) or not eval_equal(st_evaluate(wl), st_evaluate(wr), pin):
                        bad.append({"alpha": alpha, "beta": beta, "gamma": gamma, "p": p, "q": q, "r": r})
    report.add(Check.from_failures("structure_map_associativity", n, bad))

    # (iii) commutator relations whose cone misses the roots of V
    bad, n = [], 0
    vroots = set(ep.eliminated)
    for alpha, beta in itertools.product(pin.order, repeat=2):
        if alpha == _neg(beta) or alpha == beta:
            continue
        if any(_in_closed_cone(alpha, beta, g) for g in vroots):
            continue
        for p, q in itertools.product(vals, repeat=2):
            n += 1
            lhs = commutator_word(_image(ep, alpha, p), _image(ep, beta, q))
            rhs = SteinbergWord(pin, [])
            for g, v in pin.f_terms(alpha, beta, p, q):
                rhs = rhs * _image(ep, g, v)
            if not eval_equal(st_evaluate(lhs), st_evaluate(rhs), pin):
                bad.append({"alpha": alpha, "beta": beta, "p": p, "q": q})
    report.add(Check.from_failures("vacuous_commutators", n, bad))
    return report


def _in_closed_cone(alpha, beta, g):
    """``g = a alpha + b beta`` with ``a, b >= 0`` (``alpha``, ``beta`` independent)."""
    ab = cone_coefficients(alpha, beta, g)
    return ab is not None and ab[0] >= 0 and ab[1] >= 0
