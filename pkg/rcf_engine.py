"""
Decomposition of uniform families over the real algebraic numbers.

The recursion splits the family by leading coefficient and lifts each case
to the space of its normalized coefficients. Members whose fibers meet no
other member's fiber form an injective piece. Colliding pairs are split by
whether their difference polynomial vanishes identically in z: the
non-vanishing pairs recurse on a strictly smaller leading index, the
vanishing ones lose a parameter.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from algebraic_real import Scalar, root_isolate
from config import config
from descriptors import DefSetDescriptor, Selection
from errors import ContractViolation, DomainError, NormalFormError
from monomial_order import OrderIndex, precedes
from polynomials import (
    Condition, ParamPoly, Poly, PolyMap, RatFunc, Relation, guard_conditions,
)
from small_sets import SmallSetModel
from ufss_calculus import (
    append_param, dedupe_k0, insert_free_param, push_graph, recombine_products, reduce_l_to_1,
    relax_conditions, restrict_sub, substitute_param,
)
from ufss_core import FALLBACK_TAG, UFSS, DecompositionResult, RecursionTrace
from x_descriptors import (
    CollidingPairFilter, ConditionFilter, FilteredX, ImageX, IsolatedFilter, ProductX,
    RepresentativeFilter, XDescriptor, ZeroTestFilter,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RcfRecursionState:
    """Measure and bookkeeping of one recursive call."""

    k: int
    alpha: OrderIndex
    current: ParamPoly
    accumulated_constraints: Tuple[Condition, ...]
    depth: int
    trace: RecursionTrace

    @property
    def measure(self) -> Tuple[int, OrderIndex]:
        return (self.k, self.alpha)

    def child(self, rule: str, current: ParamPoly,
              constraints: Sequence[Condition] = ()) -> "RcfRecursionState":
        """State of a recursive call on ``current``; records the step."""
        alpha = current.leading_support()[1]
        depth = self.depth + 1
        if depth > config.engine.max_recursion_depth:
            raise ContractViolation(
                f"Recursion depth {depth} exceeds {config.engine.max_recursion_depth}",
                {"k": current.k, "alpha": str(alpha)},
            )
        self.trace.record(rule, self.measure, (current.k, alpha), depth)
        return RcfRecursionState(
            k=current.k,
            alpha=alpha,
            current=current,
            accumulated_constraints=self.accumulated_constraints + tuple(constraints),
            depth=depth,
            trace=self.trace,
        )


@dataclass(frozen=True)
class NormalizedCase:
    """p divided by its leading coefficient on the region where that coefficient leads."""

    index: OrderIndex
    poly: ParamPoly
    conditions: Tuple[Condition, ...]
    divisor: RatFunc


@dataclass(frozen=True)
class CollisionSplit:
    r: ParamPoly
    descent: Optional[UFSS]
    v1: Optional[UFSS]
    v2: UFSS


def _never_zero(poly: Poly) -> bool:
    """A nonzero constant, or univariate without real roots."""
    if poly.is_zero():
        return False
    if poly.is_constant():
        return True
    variables = poly.variables()
    if len(variables) != 1:
        return False
    (v,) = variables
    coeffs = [Fraction(0)] * (poly.degree_in(v) + 1)
    for exponents, coeff in poly.terms.items():
        coeffs[exponents[v]] = coeff
    return not root_isolate(coeffs)


def normalize_leading(p: ParamPoly) -> Tuple[NormalizedCase, ...]:
    """
    Split p by which support index leads.

    Case (i, j) holds where f_(i,j) != 0 and every higher coefficient
    vanishes; p is truncated there and divided by f_(i,j).

    Args:
        p: non-zero parametrized polynomial

    Returns:
        Cases from the highest index down; cases whose region is empty
        because some higher coefficient never vanishes are dropped
    """
    if p.is_zero():
        raise DomainError("normalize_leading on the zero polynomial")
    support = p.support()
    cases = []
    for position in range(len(support) - 1, -1, -1):
        index = support[position]
        higher = support[position + 1:]
        if any(_never_zero(p.coeff(i).numer) for i in higher):
            break
        quotient, divisor = p.truncate(index).divide_by(index)
        conditions = [Condition(p.coeff(i).numer, Relation.EQ) for i in higher]
        if _never_zero(divisor.numer):
            logger.debug(f"Guard {divisor} at {index} is vacuous")
        else:
            conditions.append(Condition(divisor.numer, Relation.NE))
        if not divisor.denom.is_constant():
            conditions.append(Condition(divisor.denom, Relation.NE))
        cases.append(NormalizedCase(index, quotient, tuple(conditions), divisor))
    return tuple(cases)


def coefficient_map(p: ParamPoly) -> PolyMap:
    """x -> coefficients of p in increasing index order, the leading one last."""
    support = p.support()
    return PolyMap(p.n, [p.coeff(i) for i in support[:-1]] + [RatFunc.constant(1, p.n)])


def lift_to_coefficient_space(p: ParamPoly, S: SmallSetModel,
                              X: XDescriptor) -> Tuple[DefSetDescriptor, SmallSetModel, XDescriptor]:
    """
    The family over coefficient tuples d: Z0 = {q_d(a, c) = 0}.

    The leading coefficient of q_d is the constant 1, so Z0-fibers at h(b)
    equal the fibers of p at b.
    """
    support = p.support()
    lead = support[-1]
    if p.coeff(lead) != RatFunc.constant(1, p.n):
        raise NormalFormError(f"Leading coefficient {p.coeff(lead)} is not 1; apply normalize_leading first")
    width = len(support)
    coeffs = {index: RatFunc.variable(t, width) for t, index in enumerate(support[:-1])}
    coeffs[lead] = RatFunc.constant(1, width)
    Z0 = DefSetDescriptor(m=width, k=p.k, l=1, equations=(ParamPoly(width, p.k, coeffs),), nondegenerate=True)
    mapping = coefficient_map(p)
    S0 = SmallSetModel.image(S, mapping)
    X0 = ImageX(X, mapping, model=S0)
    logger.debug(f"Lifted {len(S)} points to {len(S0)} coefficient tuples of width {width}")
    return Z0, S0, X0


def split_injective_part(Z0: DefSetDescriptor, S0: SmallSetModel,
                         X0: XDescriptor) -> Tuple[UFSS, Optional[UFSS]]:
    """
    Isolated members, and the family of colliding pairs over S0 x S0.

    The pair family has the fiber of its first member; its X keeps pairs
    d1 != d2 whose fibers intersect. None when S0 has fewer than two points.
    """
    injective = UFSS(Z0, S0, FilteredX(X0, IsolatedFilter(Z0)), injective=True)
    if len(S0) < 2:
        return injective, None
    width = Z0.m
    pairs = SmallSetModel.product([S0, S0])
    X_pairs = FilteredX(ProductX([X0, X0], model=pairs), CollidingPairFilter(Z0))
    Z_pairs = DefSetDescriptor(
        m=2 * width, k=Z0.k, l=1,
        equations=(Z0.equations[0].embed_x(0, 2 * width),),
        nondegenerate=True,
        selection=Z0.selection,
    )
    return injective, UFSS(Z_pairs, pairs, X_pairs)


def split_collisions(W: UFSS, lead: OrderIndex) -> CollisionSplit:
    """
    Split colliding pairs by whether r = q_d1 - q_d2 vanishes identically in z.

    Args:
        W: pair family from split_injective_part
        lead: leading index of q_d; r's leading index must precede it

    Returns:
        r, the envelope {r = 0} over the non-vanishing pairs, and W
        restricted to the non-vanishing and the vanishing pairs
    """
    width = W.m // 2
    q1 = W.Z.equations[0]
    q2 = q1.remap_x([width + t if t < width else t for t in range(W.m)], W.m)
    r = q1 - q2
    v2 = W.with_changes(X=FilteredX(W.X, ZeroTestFilter(r, True)))
    if r.is_zero():
        return CollisionSplit(r, None, None, v2)
    r_lead = r.leading_support()[1]
    if not precedes(r_lead, lead):
        raise ContractViolation(
            f"Difference polynomial leads at {r_lead}, not below {lead}",
            {"r": str(r), "lead": str(lead)},
        )
    X_v1 = FilteredX(W.X, ZeroTestFilter(r, False))
    Z_descent = DefSetDescriptor(m=W.m, k=W.k, l=1, equations=(r,), nondegenerate=True)
    return CollisionSplit(r, UFSS(Z_descent, W.S, X_v1), W.with_changes(X=X_v1), v2)


# -- parameter descent -------------------------------------------------------------------

def _distinct_pair(b) -> bool:
    half = len(b) // 2
    return b[:half] != b[half:]


def _remaining(S: SmallSetModel, conditions: Sequence[Condition]) -> bool:
    return any(_distinct_pair(b) and all(c.holds(b) for c in conditions) for b in S.points)


def solvable_equations(r: ParamPoly) -> List[Tuple[int, RatFunc, RatFunc]]:
    """
    Coefficient equations of the form c(x) * a_s + e(x) = 0.

    Returns:
        (s, c, e) for every z-degree group of r with exactly that shape
    """
    zero = (0,) * r.k
    found = []
    for _, group in sorted(r.coefficient_equations().items()):
        units = [e for e in group if e != zero]
        if len(units) != 1 or sum(units[0]) != 1:
            continue
        unit = units[0]
        found.append((unit.index(1), group[unit], group.get(zero, RatFunc.constant(0, r.n))))
    return found


def _restricted(v2: UFSS, conditions: Sequence[Condition]) -> UFSS:
    S = SmallSetModel.subset(v2.S, lambda b: _distinct_pair(b) and all(c.holds(b) for c in conditions))
    lifted = [c.remap(list(range(v2.m)), v2.m + v2.k) for c in conditions]
    return UFSS(v2.Z, S, FilteredX(v2.X, ConditionFilter(lifted), model=S))


def _substitution_branch(v2: UFSS, position: int, c: RatFunc, e: RatFunc,
                         pending: Sequence[Condition], state: RcfRecursionState) -> DecompositionResult:
    conditions = tuple(pending) + (Condition(c.numer, Relation.NE),)
    branch = _restricted(v2, conditions)
    if not branch.S.points:
        return DecompositionResult()
    g = PolyMap(v2.m, [-e / c])
    reduced = substitute_param(push_graph(branch, g), position, v2.m)
    target = relax_conditions(reduced)
    current = target.Z.equations[0]
    if current.is_zero():
        return DecompositionResult()
    logger.debug(f"Substituting a{position} := {g.components[0]} on {len(branch.S)} pairs")
    child = state.child('V2-SUBST', current, conditions)
    lower = _decompose(target, child)
    lifted = DecompositionResult(
        tuple(insert_free_param(piece, position) for piece in lower.pieces), lower.provenance,
    ).tagged('V2-SUBST').tagged('L39-GRAPH').tagged('L310-PARAM')
    inner = append_param(reduced, PolyMap.projection([v2.m], reduced.m + reduced.k), position)
    return restrict_sub(inner, lifted)


def _fallback(v2: UFSS, pending: Sequence[Condition]) -> DecompositionResult:
    if not config.engine.allow_fallback:
        raise ContractViolation(
            "Parameter descent found no solvable coordinate and fallback is disabled",
            {"conditions": [repr(c) for c in pending]},
        )
    branch = _restricted(v2, pending)
    logger.warning(f"No solvable coordinate left; emitting a representative piece over {len(branch.S)} pairs")
    X = FilteredX(branch.X, RepresentativeFilter(branch.Z))
    return DecompositionResult.single(UFSS(branch.Z, branch.S, X, injective=True), FALLBACK_TAG)


def recurse_v2(v2: UFSS, r: ParamPoly, state: RcfRecursionState) -> DecompositionResult:
    """
    Decompose the pairs where r vanishes identically in z.

    Each coefficient equation c(x) * a_s + e(x) = 0 yields a branch c != 0
    on which a_s is a function of the pair; the rest continues with
    c = e = 0. Whatever no equation resolves becomes a representative piece.
    """
    results = []
    zero = (0,) * r.k
    # groups without a-terms vanish only where their x-coefficient does
    pending: List[Condition] = [
        Condition(group[zero].numer, Relation.EQ)
        for _, group in sorted(r.coefficient_equations().items()) if set(group) == {zero}
    ]
    for position, c, e in solvable_equations(r):
        if not _remaining(v2.S, pending):
            return DecompositionResult.combine(results)
        results.append(_substitution_branch(v2, position, c, e, pending, state))
        pending.append(Condition(c.numer, Relation.EQ))
        if not e.is_zero():
            pending.append(Condition(e.numer, Relation.EQ))
    if _remaining(v2.S, pending):
        results.append(_fallback(v2, pending))
    return DecompositionResult.combine(results)


# -- main recursion -------------------------------------------------------------------------

def _check_normal_form(u: UFSS) -> None:
    Z = u.Z
    if Z.l != 1:
        raise NormalFormError(f"rcf_decompose needs l=1, got l={Z.l}; apply reduce_l_to_1")
    if Z.strict or Z.side_equations:
        raise NormalFormError("rcf_decompose needs a bare equation; relax and apply restrict_sub")
    if Z.selection is not None or any(s is not None for s in Z.coordinate_selections):
        raise NormalFormError("rcf_decompose does not accept fiber selections")


def _decompose_case(u: UFSS, case: NormalizedCase, state: RcfRecursionState) -> DecompositionResult:
    m, k = u.m, u.k
    q = case.poly
    degree = q.z_degree
    if degree == 0:
        logger.debug(f"Case {case.index} has no z-term; fibers are empty")
        return DecompositionResult()
    x_conditions = case.conditions + tuple(c for g in u.Z.guards for c in guard_conditions(g))
    S_case = SmallSetModel.subset(u.S, lambda b: all(c.holds(b) for c in x_conditions))
    if not S_case.points:
        return DecompositionResult()
    lifted = tuple(c.remap(list(range(m)), m + k) for c in case.conditions)
    X_case = FilteredX(u.X, ConditionFilter(lifted + u.Z.membership_conditions()), model=S_case)
    Z0, S0, X0 = lift_to_coefficient_space(q, S_case, X_case)

    results = []
    selections = [None] if degree == 1 else [Selection(j, degree) for j in range(1, degree + 1)]
    for selection in selections:
        Zj = Z0.with_changes(selection=selection)
        injective, collisions = split_injective_part(Zj, S0, X0)
        results.append(DecompositionResult.single(injective, 'X1-INJECTIVE'))
        if collisions is None:
            continue
        split = split_collisions(collisions, case.index)
        if split.descent is not None:
            child = state.child('V1-DESCENT', split.r, case.conditions)
            outer = _decompose(split.descent, child).tagged('V1-DESCENT')
            results.append(restrict_sub(split.v1, outer))
        results.append(recurse_v2(split.v2, split.r, state))
    return DecompositionResult.combine(results)


def _decompose(u: UFSS, state: RcfRecursionState) -> DecompositionResult:
    _check_normal_form(u)
    if u.k == 0:
        return dedupe_k0(u)
    p = u.Z.equations[0]
    if p.is_zero():
        if u.Z.nondegenerate:
            return DecompositionResult()
        raise NormalFormError("Equation vanishes identically; fibers are not finite")
    results = [_decompose_case(u, case, state) for case in normalize_leading(p)]
    return DecompositionResult.combine(results)


def rcf_decompose(u: UFSS) -> DecompositionResult:
    """
    Decompose a family with one equation and no strict conditions.

    Args:
        u: family with l = 1 in normal form

    Returns:
        Injective pieces with the same union at every parameter, and the
        recursion trace
    """
    _check_normal_form(u)
    if u.k == 0:
        logger.info("k=0 family, delegating to dedupe_k0")
        return dedupe_k0(u)
    p = u.Z.equations[0]
    alpha = OrderIndex.zero(u.k) if p.is_zero() else p.leading_support()[1]
    trace = RecursionTrace((u.k, alpha))
    state = RcfRecursionState(u.k, alpha, p, (), 0, trace)
    result = _decompose(u, state)
    logger.info(f"rcf_decompose: {len(result)} pieces, {len(trace.steps)} recursive steps, "
                f"{len(result.fallback_pieces)} fallback pieces")
    return result.with_traces([trace])


def decompose_family(u: UFSS, samples: Optional[Sequence[Sequence[Scalar]]] = None) -> DecompositionResult:
    """
    Run the reductions in order, then the engine.

    Strict conditions and selections are relaxed first, several output
    coordinates are split next, and the result is restricted back.
    """
    Z = u.Z
    relaxed = bool(Z.strict or Z.side_equations or Z.selection is not None
                   or any(s is not None for s in Z.coordinate_selections))
    target = u
    if relaxed:
        logger.info("Relaxing strict conditions; the result is restricted back afterwards")
        target = relax_conditions(u)
    if target.l > 1:
        families = reduce_l_to_1(target)
        logger.info(f"Dispatching {len(families)} single-coordinate families to the rcf engine")
        result = recombine_products(target, [rcf_decompose(f) for f in families], samples)
    else:
        logger.info("Dispatching to the rcf engine")
        result = rcf_decompose(target)
    if relaxed:
        result = restrict_sub(u, result, samples)
    return result
