from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rppsieve.generate import GenConfig, MatchingGenConfig, random_cbm, random_ee, random_rpp
from rppsieve.instances import CbmInstance, EeInstance, RppInstance
from rppsieve.io import ParseError, kind_name, load, parse, save, serialize

FIXTURES = sorted((Path(__file__).parent / "fixtures").iterdir())


@pytest.mark.parametrize("path", FIXTURES, ids=lambda p: p.name)
def test_fixture_round_trip(path):
    text = path.read_text()
    inst = load(path)
    assert serialize(inst) == text
    assert kind_name(inst) == path.suffix[1:]


def test_parse_rpp():
    inst = parse("kind drpp\nvertices 2\nbudget 3  # trailing comment\n\narc 1 2 5 1\narc 2 1 1 0\n")
    assert isinstance(inst, RppInstance)
    assert inst.kind == "directed" and inst.n == 2 and inst.budget == 3
    assert [(a.tail, a.head, a.weight, a.required) for a in inst.arcs] == [(0, 1, 5, True), (1, 0, 1, False)]


def test_parse_ee_defaults_to_cap():
    inst = parse("kind uee\nvertices 3\nbudget 2\nreq 1 2\nw 2 1 1\n")
    assert isinstance(inst, EeInstance)
    assert inst.weight[0, 1] == inst.weight[1, 0] == 1
    assert inst.weight[0, 2] == 3


def test_parse_cbm():
    inst = parse("kind cgm\nvertices 2\nbudget 0\npart 1 1\npart 2 2\nedge 1 2 0\nconjoin 2 1\n")
    assert isinstance(inst, CbmInstance)
    assert inst.part == (0, 1) and inst.requests == ((0, 1),)


@pytest.mark.parametrize(
    "text,line",
    [
        ("", 0),
        ("vertices 2\n", 1),
        ("kind xyz\n", 1),
        ("kind drpp\nvertices 2\nbudget 0\narc 1 3 1 1\n", 4),
        ("kind drpp\nvertices 2\nbudget 0\narc 1 2 1 2\n", 4),
        ("kind drpp\nvertices 2\nbudget 0\narc 1 2 x 1\n", 4),
        ("kind drpp\nvertices 2\nbudget 0\narc 1 2 -1 1\n", 4),
        ("kind drpp\nvertices 2\nbudget 0\narc 1 2 1\n", 4),
        ("kind drpp\nvertices 2\nbudget 0\nreq 1 2\n", 4),
        ("kind drpp\narc 1 2 1 1\n", 2),
        ("kind drpp\nvertices 2\nvertices 3\n", 3),
        ("kind drpp\nvertices 2\nbudget 0\nkind drpp\n", 4),
        ("kind drpp\nvertices 2\nbudget 0\nbogus 1\n", 4),
        ("kind ee\nvertices 2\nbudget 0\nw 1 1 0\n", 4),
        ("kind ee\nvertices 2\nbudget 0\nw 1 2 0\nw 1 2 1\n", 5),
        ("kind uee\nvertices 2\nbudget 0\nw 1 2 0\nw 2 1 1\n", 5),
        ("kind cbm\nvertices 2\nbudget 0\npart 1 1\npart 2 1\nside 1 L\n", 0),
        ("kind cgm\nvertices 2\nbudget 0\npart 1 1\npart 2 1\nside 1 L\n", 6),
        ("kind cbm\nvertices 2\nbudget 0\npart 1 1\npart 1 2\n", 5),
        ("kind cgm\nvertices 2\nbudget 0\npart 1 1\n", 0),
        ("kind cgm\nvertices 2\nbudget 0\npart 1 1\npart 2 1\nedge 1 1 3\n", 0),
    ],
)
def test_parse_errors(text, line):
    with pytest.raises(ParseError) as info:
        parse(text)
    assert info.value.lineno == line
    assert f"line {line}" in str(info.value)


def test_parse_error_is_value_error():
    assert issubclass(ParseError, ValueError)


def test_save_and_load(tmp_path):
    inst = random_rpp(GenConfig(n=5, k=2), 3)
    save(inst, tmp_path / "a.drpp")
    assert load(tmp_path / "a.drpp") == inst


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.booleans(), st.sampled_from(["rpp", "ee", "cbm"]))
def test_serialize_parse_identity(seed, flag, family):
    if family == "rpp":
        inst = random_rpp(GenConfig(n=6, k=2), seed, flag)
    elif family == "ee":
        inst = random_ee(GenConfig(n=5, k=2, budget=3), seed, flag)
    else:
        inst = random_cbm(MatchingGenConfig(side=3), seed, flag)
    text = serialize(inst)
    again = parse(text)
    assert serialize(again) == text
    if family != "ee":
        assert again == inst
