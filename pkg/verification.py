"""
Exact oracles for decomposition outputs.

Every check enumerates fibers at rational sample parameters and compares
algebraic reals exactly. A failed check always carries the sample and the
points that witness the failure.
"""
import itertools
import json
import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

from algebraic_real import format_rational, parse_rational
from config import config
from errors import DegenerateFiberError, DimensionError
from monomial_order import precedes, sigma_inv
from polynomials import Point, make_point
from ufss_core import UFSS, ChoiceDecomposition, ChoiceInstance, DecompositionResult, RecursionTrace

logger = logging.getLogger(__name__)

PASS = 'PASS'
FAIL = 'FAIL'


def _fmt(point: Sequence[Any]) -> List[str]:
    return [str(v) for v in point]


# -- sample grids ------------------------------------------------------------------

@dataclass(frozen=True)
class SampleGrid:
    """
    Rational parameter samples.

    Attributes:
        axes: (lo, hi, step) per parameter coordinate; a single axis is reused
            for every coordinate
        random_points: extra seeded points drawn inside the axis ranges
        seed: seed of those points
        explicit_points: replaces the axes when given
    """

    axes: Tuple[Tuple[Fraction, Fraction, Fraction], ...] = ()
    random_points: int = 0
    seed: int = 0
    explicit_points: Tuple[Point, ...] = ()

    @classmethod
    def parse(cls, spec: str, random_points: int = 0, seed: int = 0) -> "SampleGrid":
        """Parse ``"lo:hi:step,lo:hi:step,..."``; an empty spec has no axes."""
        axes = []
        for part in filter(None, (p.strip() for p in spec.split(','))):
            fields = part.split(':')
            if len(fields) != 3:
                raise ValueError(f"Grid axis {part!r} is not of the form lo:hi:step")
            lo, hi, step = (parse_rational(f) for f in fields)
            if step <= 0 or hi < lo:
                raise ValueError(f"Grid axis {part!r} needs lo <= hi and a positive step")
            axes.append((lo, hi, step))
        return cls(tuple(axes), random_points, seed)

    @classmethod
    def default(cls, k: int) -> "SampleGrid":
        return cls.parse(config.get_default_grid(k), config.grid.random_points, config.grid.seed)

    @classmethod
    def of_points(cls, points: Iterable[Sequence[Any]]) -> "SampleGrid":
        return cls(explicit_points=tuple(make_point(p) for p in points))

    def spec(self) -> str:
        return ",".join(":".join(format_rational(v) for v in axis) for axis in self.axes)

    def _axes_for(self, k: int) -> Tuple[Tuple[Fraction, Fraction, Fraction], ...]:
        if len(self.axes) == k:
            return self.axes
        if len(self.axes) == 1:
            return self.axes * k
        raise DimensionError(f"Grid with {len(self.axes)} axes for {k} parameters")

    def points(self, k: int) -> Tuple[Point, ...]:
        """Sorted sample parameters of arity k."""
        if k == 0:
            return ((),)
        if self.explicit_points:
            for p in self.explicit_points:
                if len(p) != k:
                    raise DimensionError(f"Explicit sample {p} does not have arity {k}")
            return tuple(sorted(set(self.explicit_points)))
        axes = self._axes_for(k)
        values = []
        for lo, hi, step in axes:
            count = int((hi - lo) / step)
            values.append([lo + i * step for i in range(count + 1)])
        samples = {tuple(p) for p in itertools.product(*values)}
        rng = random.Random(self.seed)
        for _ in range(self.random_points):
            point = []
            for lo, hi, _step in axes:
                denominator = rng.randint(1, 16)
                point.append(lo + Fraction(rng.randint(0, int((hi - lo) * denominator)), denominator))
            samples.add(tuple(point))
        return tuple(sorted(make_point(p) for p in samples))


# -- reports -------------------------------------------------------------------------

@dataclass
class Check:
    name: str
    status: str
    witness: Dict[str, Any] = field(default_factory=dict)
    detail: str = ''

    @property
    def passed(self) -> bool:
        return self.status == PASS

    def to_dict(self) -> Dict[str, Any]:
        return {"name": self.name, "status": self.status, "witness": self.witness, "detail": self.detail}


@dataclass
class VerificationReport:
    """Ordered checks; PASS iff every check passed."""

    checks: List[Check] = field(default_factory=list)

    def add(self, name: str, ok: bool, witness: Optional[Dict[str, Any]] = None, detail: str = '') -> Check:
        check = Check(name, PASS if ok else FAIL, {} if ok else dict(witness or {}), detail)
        self.checks.append(check)
        if not ok:
            logger.warning(f"Check {name} failed: {detail} {check.witness}")
        return check

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def status(self) -> str:
        return PASS if self.passed else FAIL

    @property
    def failures(self) -> List[Check]:
        return [c for c in self.checks if not c.passed]

    def merge(self, *others: "VerificationReport") -> "VerificationReport":
        checks = list(self.checks)
        for other in others:
            checks.extend(other.checks)
        return VerificationReport(checks)

    def to_dict(self) -> Dict[str, Any]:
        return {"status": self.status, "checks": [c.to_dict() for c in self.checks]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def summary_table(self) -> str:
        width = max([len(c.name) for c in self.checks] + [5])
        lines = [f"{'CHECK'.ljust(width)}  STATUS  DETAIL", "-" * (width + 24)]
        for c in self.checks:
            lines.append(f"{c.name.ljust(width)}  {c.status.ljust(6)}  {c.detail}")
        lines.append("-" * (width + 24))
        lines.append(f"{'OVERALL'.ljust(width)}  {self.status}")
        return "\n".join(lines)


# -- UFSS oracles ------------------------------------------------------------------

def _original_union(u: UFSS, a: Point) -> Tuple[Optional[Tuple[Point, ...]], Optional[DegenerateFiberError]]:
    try:
        return u.union_at(a), None
    except DegenerateFiberError as e:
        return None, e


def verify_union(original: UFSS, result: DecompositionResult, grid: SampleGrid) -> VerificationReport:
    """Compare the fiber unions of the family and of the pieces at every sample."""
    report = VerificationReport()
    samples = grid.points(original.k)
    for piece in result.pieces:
        if (piece.k, piece.l) != (original.k, original.l):
            report.add('union', False, {"piece": repr(piece)}, "piece arities differ from the original")
            return report
    for a in samples:
        expected, degenerate = _original_union(original, a)
        if degenerate is not None:
            report.add('union', False, {"a": _fmt(a), "b": _fmt(degenerate.b)}, "degenerate fiber")
            return report
        found = result.union_at(a)
        missing = sorted(set(expected) - set(found))
        extra = sorted(set(found) - set(expected))
        if missing or extra:
            c, side = (missing[0], 'original only') if missing else (extra[0], 'decomposition only')
            report.add('union', False, {"a": _fmt(a), "c": _fmt(c), "side": side}, f"root in {side}")
            return report
    report.add('union', True, detail=f"{len(samples)} samples")
    return report


def verify_injectivity(result: DecompositionResult, grid: SampleGrid) -> VerificationReport:
    """Distinct members of one piece have disjoint fibers at every sample."""
    report = VerificationReport()
    total = 0
    for index, piece in enumerate(result.pieces):
        for a in grid.points(piece.k):
            members = piece.X.x_fiber(a)
            fibers = [set(piece.Z.fiber(b, a)) for b in members]
            total += 1
            for i, j in itertools.combinations(range(len(members)), 2):
                shared = fibers[i] & fibers[j]
                if shared:
                    witness = {
                        "piece": index, "a": _fmt(a), "b": _fmt(members[i]), "c": _fmt(members[j]),
                        "shared": _fmt(min(shared)),
                    }
                    report.add('injectivity', False, witness, f"piece {index} has overlapping fibers")
                    return report
    report.add('injectivity', True, detail=f"{len(result.pieces)} pieces, {total} fibers")
    return report


def verify_small_containment(result: DecompositionResult, grid: Optional[SampleGrid] = None) -> VerificationReport:
    """X fibers lie in S, and every S derives from base sets by image, product and subset."""
    report = VerificationReport()
    for index, piece in enumerate(result.pieces):
        problems = piece.S.chain_problems()
        if problems:
            report.add('small_containment', False, {"piece": index, "problems": list(problems)},
                       f"piece {index} has an invalid derivation chain")
            return report
        samples = (grid or SampleGrid.default(piece.k)).points(piece.k)
        for a in samples:
            for b in piece.X.x_fiber(a):
                if b not in piece.S:
                    report.add('small_containment', False, {"piece": index, "a": _fmt(a), "b": _fmt(b)},
                               f"piece {index} has a member outside its small set")
                    return report
    report.add('small_containment', True, detail=f"{len(result.pieces)} pieces")
    return report


@dataclass
class BruteForceAssignment:
    """Per sample, each root of the union mapped to the least member producing it."""

    assignments: Dict[Point, Dict[Point, Point]] = field(default_factory=dict)
    degenerate: List[Tuple[Point, Point]] = field(default_factory=list)

    def cover(self, a: Sequence[Any]) -> Tuple[Point, ...]:
        return tuple(sorted(self.assignments.get(make_point(a), {})))

    def sources(self, a: Sequence[Any]) -> Tuple[Point, ...]:
        return tuple(sorted(set(self.assignments.get(make_point(a), {}).values())))


def brute_force_decompose(u: UFSS, grid: SampleGrid) -> BruteForceAssignment:
    """Pointwise injective assignment; degenerate (b, a) pairs are recorded, not raised."""
    result = BruteForceAssignment()
    for a in grid.points(u.k):
        assignment: Dict[Point, Point] = {}
        for b in u.X.x_fiber(a):
            try:
                roots = u.Z.fiber(b, a)
            except DegenerateFiberError:
                result.degenerate.append((a, b))
                continue
            for c in roots:
                assignment.setdefault(c, b)
        result.assignments[a] = assignment
    return result


def verify_oracle(original: UFSS, result: DecompositionResult, grid: SampleGrid) -> VerificationReport:
    """Compare the symbolic cover with brute-force enumeration."""
    report = VerificationReport()
    brute = brute_force_decompose(original, grid)
    if brute.degenerate:
        a, b = brute.degenerate[0]
        report.add('oracle', False, {"a": _fmt(a), "b": _fmt(b)}, "degenerate fiber in the original")
        return report
    for a in grid.points(original.k):
        expected, found = set(brute.cover(a)), set(result.union_at(a))
        if expected != found:
            c = min(expected ^ found)
            report.add('oracle', False, {"a": _fmt(a), "c": _fmt(c), "in_original": c in expected},
                       "symbolic cover differs from enumeration")
            return report
    report.add('oracle', True, detail=f"{len(brute.assignments)} samples")
    return report


def _measure_str(measure) -> List[str]:
    return [str(measure[0]), str(measure[1])]


def verify_termination_trace(trace: RecursionTrace) -> VerificationReport:
    """Every step lowers (k, alpha) lexicographically; depth stays within the potential."""
    report = VerificationReport()
    for step in trace.steps:
        (k0, a0), (k1, a1) = step.before, step.after
        if not (k1 < k0 or (k1 == k0 and precedes(a1, a0))):
            report.add('termination', False,
                       {"rule": step.rule, "before": _measure_str(step.before), "after": _measure_str(step.after)},
                       "recursion measure did not decrease")
            return report
    k, alpha = trace.initial
    bound = sigma_inv(alpha) + k + 1
    if trace.max_depth > bound:
        report.add('termination', False, {"depth": trace.max_depth, "bound": bound}, "recursion too deep")
        return report
    report.add('termination', True, detail=f"{len(trace.steps)} steps, depth {trace.max_depth} <= {bound}")
    return report


# -- choice oracle -----------------------------------------------------------------

def verify_choice(instance: ChoiceInstance, dec: ChoiceDecomposition, grid: SampleGrid) -> VerificationReport:
    """X_i,a inside Y_i, h_i(-, a) injective on X_i,a, and the images cover h(S cap Z_a, a)."""
    report = VerificationReport()
    samples = grid.points(instance.k)
    for a in samples:
        for index, piece in enumerate(dec.pieces):
            seen: Dict[Point, Point] = {}
            for t in piece.X.x_fiber(a):
                if t not in piece.Y:
                    report.add('choice_containment', False, {"piece": index, "a": _fmt(a), "t": _fmt(t)},
                               f"piece {index} has a member outside Y")
                    return report
                value = piece.h.evaluate(t, a)
                if value is None:
                    continue
                if value in seen:
                    report.add('choice_injectivity', False,
                               {"piece": index, "a": _fmt(a), "b": _fmt(seen[value]), "c": _fmt(t),
                                "value": _fmt(value)},
                               f"piece {index} maps two members to one value")
                    return report
                seen[value] = t
        expected, found = set(instance.image_at(a)), set(dec.union_at(a))
        if expected != found:
            c = min(expected ^ found)
            report.add('choice_cover', False, {"a": _fmt(a), "c": _fmt(c), "in_original": c in expected},
                       "images differ")
            return report
    for name in ('choice_containment', 'choice_injectivity', 'choice_cover'):
        report.add(name, True, detail=f"{len(samples)} samples, {len(dec.pieces)} pieces")
    return report
