"""Tests for the seeded corpus generator."""
from config import GeneratorConfig
from instance_generator import (
    collision_families, collision_fixture, generate_corpus, template_families, v2_fallback_family,
    v2_substitution_family, write_corpus,
)
from instance_io import LinearInstance, instance_to_wire, parse_instance
from ufss_core import UFSS, ChoiceInstance
from verification import SampleGrid


def test_corpus_is_deterministic():
    first = [instance_to_wire(i) for i in generate_corpus(count=12, seed=7)]
    again = [instance_to_wire(i) for i in generate_corpus(count=12, seed=7)]
    assert first == again
    assert first[0] == instance_to_wire(collision_fixture())


def test_default_corpus_meets_the_quotas():
    bounds = GeneratorConfig()
    corpus = generate_corpus(seed=3)
    families = [i for i in corpus if isinstance(i, UFSS)]
    assert len(families) == bounds.count >= 20
    assert sum(isinstance(i, LinearInstance) for i in corpus) == bounds.linear_count
    assert sum(isinstance(i, ChoiceInstance) for i in corpus) == bounds.indep_count
    templates = [instance_to_wire(u) for u in template_families()]
    assert [instance_to_wire(u) for u in families[:len(templates)]] == templates


def test_collision_templates_collide():
    grid = SampleGrid.default(1).points(1)
    families = collision_families()
    assert len(families) == 5
    for u in families:
        # singleton fibers, so a short union means two members met
        assert any(len(u.union_at(a)) < len(u.S) for a in grid)


def test_v2_templates_agree_identically_in_z():
    templates = [v2_substitution_family(), v2_substitution_family([(1,), (3,)]), v2_fallback_family()]
    assert [u.k for u in templates] == [1, 1, 2]
    for u in templates:
        # the union at the meeting parameter is smaller than the members' fibers combined
        a = (1,) if u.k == 1 else (1, 0)
        sizes = sum(len(u.Z.fiber(b, a)) for b in u.S.points)
        assert len(u.union_at(a)) < sizes


def test_corpus_mixes_families_and_maps():
    corpus = generate_corpus(count=9, seed=3, linear_count=2, indep_count=3)
    assert len(corpus) == 14
    assert all(isinstance(i, UFSS) for i in corpus[:9])
    assert all(isinstance(i, LinearInstance) for i in corpus[9:11])
    assert all(isinstance(i, ChoiceInstance) for i in corpus[11:])


def test_generator_respects_bounds():
    bounds = GeneratorConfig(max_n=1, max_k=1, max_points=2)
    corpus = generate_corpus(count=14, seed=11, bounds=bounds, linear_count=3, indep_count=3)
    for instance in corpus[len(template_families()):]:
        if isinstance(instance, UFSS):
            assert (instance.m, instance.k) == (1, 1)
            assert len(instance.S) <= 2
        elif isinstance(instance, LinearInstance):
            assert (instance.h.n, instance.h.k) == (1, 1)
        else:
            assert (instance.n, instance.k) == (1, 1)
            assert len(instance.S) <= 2


def test_empty_corpus():
    assert generate_corpus(count=0, linear_count=0, indep_count=0) == []


def test_written_corpus_parses(tmp_path):
    paths = write_corpus(tmp_path, count=3, seed=1, linear_count=1, indep_count=1)
    assert [p.name for p in paths][-1] == "instance_004.json"
    assert isinstance(parse_instance(paths[3]), LinearInstance)
    assert isinstance(parse_instance(paths[4]), ChoiceInstance)
