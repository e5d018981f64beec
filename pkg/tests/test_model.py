import json

import numpy as np
import pytest

from datasmell.errors import ConfigError
from datasmell.model import (PRESETS, SHIPPED_IDS, Finding, Granularity, Registry, Resources,
                             SmellCategory, SmellDescriptor, register_descriptors, resolve_preset)


def test_registry_holds_seventeen_smells():
    reg = register_descriptors()
    assert len(reg) == 17
    assert reg.ids() == list(SHIPPED_IDS)
    assert reg["UE-INT-STR"].name == "Integer as String"
    assert reg["C-ABBREV"].name == "Abbreviation Inconsistency"


def test_every_category_is_populated():
    reg = register_descriptors()
    cats = {d.category for d in reg}
    assert cats == set(SmellCategory)
    for d in reg:
        prefix = d.id.split("-")[0]
        expected = {"B": SmellCategory.BELIEVABILITY,
                    "UE": SmellCategory.UNDERSTANDABILITY_ENCODING,
                    "US": SmellCategory.UNDERSTANDABILITY_SYNTACTIC,
                    "C": SmellCategory.CONSISTENCY}[prefix]
        assert d.category == expected, d.id


def test_duplicate_registration_rejected():
    reg = register_descriptors()
    with pytest.raises(ConfigError):
        reg.register(reg["B-DUMMY"])


def test_malformed_id_rejected():
    with pytest.raises(ConfigError):
        SmellDescriptor("dummy", "x", SmellCategory.BELIEVABILITY, Granularity.INSTANCE,
                        frozenset(), "doc")


def test_unknown_id_lookup():
    with pytest.raises(ConfigError):
        Registry()["B-NOPE"]


def test_default_preset_values():
    cfg = resolve_preset("default")
    assert cfg.get("US-LONG")["min_run"] == 30
    assert cfg.density_threshold == 0.10
    assert cfg.get("B-AMBIG-VAL")["similarity"] == 0.90
    assert cfg.get("C-SYN")["cosine"] == 0.75
    assert set(cfg.params) == set(SHIPPED_IDS)


def test_strict_threshold_not_above_default():
    assert resolve_preset("strict").density_threshold <= resolve_preset("default").density_threshold
    assert resolve_preset("strict").get("B-AMBIG-VAL")["similarity"] == 0.85


def test_unknown_preset():
    with pytest.raises(ConfigError):
        resolve_preset("weird")


def test_overrides_are_validated_and_copied():
    base = resolve_preset("default")
    cfg = base.with_overrides({"US-LONG": {"min_run": 12}}, density_threshold=0.3)
    assert cfg.get("US-LONG")["min_run"] == 12
    assert base.get("US-LONG")["min_run"] == 30
    assert cfg.density_threshold == 0.3
    with pytest.raises(ConfigError):
        base.with_overrides({"US-LONG": {"nope": 1}})
    with pytest.raises(ConfigError):
        base.with_overrides({"X-Y": {}})
    with pytest.raises(ConfigError):
        base.with_overrides(density_threshold=1.5)
    with pytest.raises(ConfigError):
        base.with_overrides(sample_cap=0)


def test_config_dict_is_json_ready():
    for name in PRESETS:
        d = resolve_preset(name).to_dict()
        assert json.loads(json.dumps(d)) == d


def test_finding_round_trip():
    f = Finding("B-DUMMY", 2, Granularity.INSTANCE, 3, ((0, "999"), (4, "999")), "lexicon",
                {"repeat_min": 3}, rows=np.array([0, 4, 9]))
    back = Finding.from_dict(json.loads(f.to_json()))
    assert back == f
    with pytest.raises(ValueError):
        Finding("B-DUMMY", 0, Granularity.INSTANCE, 0, ((0, "x"),))


def test_resources_validate_vectors():
    Resources(vectors={"a": np.ones(3), "b": np.zeros(3)})
    with pytest.raises(ConfigError):
        Resources(vectors={"a": np.ones(3), "b": np.ones(2)})


def test_resource_fingerprint_tracks_content():
    a = Resources(thesaurus={"couch": frozenset({"sofa"})})
    b = Resources(thesaurus={"couch": frozenset({"settee"})})
    assert a.fingerprint() != b.fingerprint()
    assert a.fingerprint() == Resources(thesaurus={"couch": frozenset({"sofa"})}).fingerprint()
    assert not Resources().has_synonym_source and a.has_synonym_source
