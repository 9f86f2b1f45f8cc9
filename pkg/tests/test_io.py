import json
from pathlib import Path

import pytest

import plcg
from plcg import examples
from plcg.io import (
    InputError,
    Manifest,
    dumps,
    group_from_json,
    group_to_json,
    hom_from_json,
    hom_to_json,
    linking_from_json,
    linking_to_json,
)
from conftest import pipeline

CORPUS = Path(plcg.__file__).parent / "corpus"


@pytest.mark.parametrize("name", sorted(examples.BUILDERS))
def test_group_round_trip(name):
    G = examples.by_name(name)
    H = group_from_json(json.loads(dumps(group_to_json(G))))
    assert group_to_json(H) == group_to_json(G)
    assert H.cocycle == G.cocycle and H.action == G.action


def test_shipped_corpus_is_current(tmp_path):
    names = examples.write_corpus(tmp_path)
    for n in names:
        assert (tmp_path / n).read_text() == (CORPUS / n).read_text(), n


def test_tables_round_trip():
    from plcg.linking import TablesLinking

    G, F, L = pipeline("d8-finite")[:3]
    T = TablesLinking.from_transporter(L)
    T2 = linking_from_json(F, json.loads(dumps(linking_to_json(T))))
    assert linking_to_json(T2) == linking_to_json(T)


def test_hom_round_trip_and_missing_rep():
    G, F, L, data = pipeline("d8-finite")[:4]
    f = next(fs[0] for fs in data.M.values() if fs)
    d = hom_to_json(f)
    assert hom_from_json(G, d) == f
    d["map"] = d["map"][:-1]
    if len(f.source.reps) > 1:
        with pytest.raises(InputError):
            hom_from_json(G, d)


def test_manifest_errors(tmp_path):
    with pytest.raises(InputError):
        Manifest.load(tmp_path / "nope.json")
    (tmp_path / "m.json").write_text(json.dumps({"group": "absent.group.json"}))
    with pytest.raises(InputError):
        Manifest.load(tmp_path / "m.json")
    (tmp_path / "bad.json").write_text("{not json")
    with pytest.raises(InputError):
        Manifest.load(tmp_path / "bad.json")
    with pytest.raises(InputError):
        group_from_json(group_to_json(examples.inv_torus()), level=0)


def test_manifest_loads_corpus():
    G, F, L = Manifest.load(CORPUS / "nonsplit-j2.manifest.json").load_all()
    assert G.name == "nonsplit-j2" and L.model == "transporter"
    G, F, L = Manifest.load(CORPUS / "d8-finite.manifest.json").load_all()
    assert L.model == "tables"
