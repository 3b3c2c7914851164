"""
Seeded generator of small instances for end-to-end runs.

A corpus holds ``count`` families, then affine maps, then maps over open
cells. The families start with fixed templates: five whose members collide
at some parameter (the first is the product family z - x*y over S = {1, 2})
and three whose colliding pairs agree identically in z, so the parameter
descent runs. Random families fill the rest.
"""
import logging
import random
from fractions import Fraction
from pathlib import Path
from typing import List, Optional, Union

from config import GeneratorConfig, config
from descriptors import DefSetDescriptor
from independent_engine import RegularCellDescriptor, Regularity
from instance_io import LinearInstance, instance_to_wire, write_json
from linear_engine import AffineMapDescriptor
from polynomials import Condition, ParamPoly, Poly
from small_sets import SmallSetModel
from ufss_core import UFSS, ChoiceInstance, MapDescriptor
from x_descriptors import ExplicitX

logger = logging.getLogger(__name__)

Generated = Union[UFSS, LinearInstance, ChoiceInstance]


def single_equation_family(m: int, k: int, poly: Poly, points) -> UFSS:
    """Nondegenerate l = 1 family cut out by ``poly`` over (x, y, z), with X = S."""
    p = ParamPoly.from_poly(poly, m, k)
    Z = DefSetDescriptor(m=m, k=k, l=1, equations=(p,), nondegenerate=True)
    S = SmallSetModel.base(m, points)
    return UFSS(Z, S, ExplicitX(S, k, Z.membership_conditions()))


def collision_fixture() -> UFSS:
    """z - x*y with S = {1, 2}: fibers {a} and {2a}, equal at a = 0."""
    poly = Poly(3, {(0, 0, 1): 1, (1, 1, 0): -1})
    return single_equation_family(1, 1, poly, [(1,), (2,)])


def collision_families() -> List[UFSS]:
    """Five families whose singleton fibers coincide at a = 0 or a = -1."""
    product = Poly(3, {(0, 0, 1): 1, (1, 1, 0): -1})
    return [
        collision_fixture(),
        single_equation_family(1, 1, product, [(1,), (3,)]),
        single_equation_family(1, 1, product, [(-1,), (1,), (2,)]),
        # z = x*y^2
        single_equation_family(1, 1, Poly(3, {(0, 0, 1): 1, (1, 2, 0): -1}), [(1,), (2,)]),
        # z = x*(y + 1)
        single_equation_family(1, 1, Poly(3, {(0, 0, 1): 1, (1, 1, 0): -1, (1, 0, 0): -1}), [(1,), (2,)]),
    ]


def v2_substitution_family(points=((1,), (2,))) -> UFSS:
    """z^3 + x*y*z - x*z: members agree identically in z at y = 1, a solvable equation."""
    poly = Poly(3, {(0, 0, 3): 1, (1, 1, 1): 1, (1, 0, 1): -1})
    return single_equation_family(1, 1, poly, list(points))


def v2_fallback_family() -> UFSS:
    """z^4 + x*(y1^2 + y2^2)*z - x*z: members agree on the unit circle, which no linear equation solves."""
    poly = Poly(4, {(0, 0, 0, 4): 1, (1, 2, 0, 1): 1, (1, 0, 2, 1): 1, (1, 0, 0, 1): -1})
    return single_equation_family(1, 2, poly, [(1,), (2,)])


def template_families() -> List[UFSS]:
    return collision_families() + [
        v2_substitution_family(),
        v2_substitution_family([(1,), (3,)]),
        v2_fallback_family(),
    ]


def _exponents(rng: random.Random, nvars: int, degree: int) -> tuple:
    values = [0] * nvars
    for _ in range(degree):
        values[rng.randrange(nvars)] += 1
    return tuple(values)


def random_family(rng: random.Random, bounds: GeneratorConfig) -> UFSS:
    """One equation with a constant-coefficient z-power term, so no fiber is degenerate."""
    m = rng.randint(1, bounds.max_n)
    k = rng.randint(1, bounds.max_k)
    width = m + k + 1
    z_degree = rng.randint(1, min(2, bounds.max_degree))
    pairs = [((0,) * (width - 1) + (z_degree,), rng.choice([1, 1, 2, -1]))]
    for _ in range(rng.randint(1, 3)):
        degree = rng.randint(0, bounds.max_degree - 1)
        exponents = list(_exponents(rng, width - 1, degree)) + [rng.randint(0, z_degree - 1)]
        if sum(exponents) <= bounds.max_degree:
            pairs.append((tuple(exponents), rng.choice([-2, -1, 1, 2])))
    size = rng.randint(1, bounds.max_points)
    points = {tuple(Fraction(rng.randint(-3, 3), rng.choice([1, 1, 2])) for _ in range(m)) for _ in range(size)}
    return single_equation_family(m, k, Poly.from_terms(width, pairs), sorted(points))


def random_linear(rng: random.Random, bounds: GeneratorConfig) -> LinearInstance:
    n = rng.randint(1, bounds.max_n)
    k = rng.randint(1, bounds.max_k)
    l = rng.randint(1, 2)
    r = [[rng.randint(-2, 2) for _ in range(n)] for _ in range(l)]
    s = [[rng.randint(-2, 2) for _ in range(k)] for _ in range(l)]
    b = [rng.randint(-2, 2) for _ in range(l)]
    size = rng.randint(1, bounds.max_points)
    points = {tuple(rng.randint(-2, 2) for _ in range(n)) for _ in range(size)}
    return LinearInstance(AffineMapDescriptor(n, k, l, r, s, b), SmallSetModel.base(n, points))


def random_independent(rng: random.Random, bounds: GeneratorConfig) -> ChoiceInstance:
    """
    A map increasing in every coordinate over one open cell.

    The map is a positive combination of the coordinates, sometimes plus
    x1^3; the cell is the whole space or the half-space x1 + y1 > c.
    """
    n = rng.randint(1, bounds.max_n)
    k = rng.randint(1, bounds.max_k)
    width = n + k
    terms = {tuple(int(i == j) for i in range(width)): rng.randint(1, 3) for j in range(width)}
    if rng.random() < 0.5:
        terms[(3,) + (0,) * (width - 1)] = 1
    h_poly = Poly(width, terms)
    ambient = ()
    if rng.random() < 0.5:
        half_space = Poly(width, {(1,) + (0,) * (width - 1): 1, (0,) * n + (1,) + (0,) * (k - 1): 1,
                                  (0,) * width: -rng.randint(-2, 2)})
        ambient = (Condition(half_space, '>'),)
    domain = DefSetDescriptor.region(n, k, ambient)
    cell = RegularCellDescriptor(domain, h_regularity=(Regularity.STRICT_INC,) * width)
    size = rng.randint(1, bounds.max_points)
    points = {tuple(rng.randint(-2, 2) for _ in range(n)) for _ in range(size)}
    h = MapDescriptor.from_polys(n, k, [h_poly], domain)
    return ChoiceInstance(n, k, 1, h, SmallSetModel.base(n, points), domain, (cell,))


def generate_corpus(count: Optional[int] = None, seed: Optional[int] = None,
                    bounds: Optional[GeneratorConfig] = None, linear_count: Optional[int] = None,
                    indep_count: Optional[int] = None) -> List[Generated]:
    """
    Deterministic corpus of families, affine maps and cell maps.

    Args:
        count: number of families; the templates come first and are cut
            off when count is smaller
        seed: seed of the random fill
        bounds: generator bounds, config.generator by default
        linear_count: number of affine maps appended after the families
        indep_count: number of cell maps appended last

    Returns:
        count families, then linear_count affine maps, then indep_count cell maps
    """
    bounds = bounds or config.generator
    count = bounds.count if count is None else count
    seed = bounds.seed if seed is None else seed
    linear_count = bounds.linear_count if linear_count is None else linear_count
    indep_count = bounds.indep_count if indep_count is None else indep_count
    rng = random.Random(seed)
    corpus: List[Generated] = list(template_families()[:count])
    while len(corpus) < count:
        corpus.append(random_family(rng, bounds))
    corpus.extend(random_linear(rng, bounds) for _ in range(linear_count))
    corpus.extend(random_independent(rng, bounds) for _ in range(indep_count))
    logger.info(f"Generated {count} families, {linear_count} affine maps and {indep_count} cell maps "
                f"with seed {seed}")
    return corpus


def write_corpus(out_dir: Path, count: Optional[int] = None, seed: Optional[int] = None,
                 linear_count: Optional[int] = None, indep_count: Optional[int] = None) -> List[Path]:
    paths = []
    corpus = generate_corpus(count, seed, linear_count=linear_count, indep_count=indep_count)
    for index, instance in enumerate(corpus):
        path = Path(out_dir) / f"instance_{index:03d}.json"
        write_json(path, instance_to_wire(instance))
        paths.append(path)
    logger.info(f"Wrote {len(paths)} instances to {out_dir}")
    return paths
