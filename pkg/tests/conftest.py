import json

import numpy as np
import pytest

from nonsubgreedy.setfn import GroundElement, TabularOracle
from nonsubgreedy.instances import random_instance, rng_for


def tab(values, blocks=None):
    """Tabular oracle from ``{"a,b": v}``; element blocks default to one per id."""
    ids = sorted({i for k in values for i in k.split(",") if i})
    blocks = blocks or {i: j + 1 for j, i in enumerate(ids)}
    return TabularOracle([GroundElement(i, blocks[i]) for i in ids], values)


@pytest.fixture
def pair_sub():
    # submodular: a and b overlap
    return tab({"": 0, "a": 1, "b": 1, "a,b": 1.5})


@pytest.fixture
def pair_super():
    # supermodular: a and b complement each other
    return tab({"": 0, "a": 1, "b": 1, "a,b": 3})


@pytest.fixture
def modular3():
    w = {"a": 1.0, "b": 2.0, "c": 0.5}
    vals = {}
    for m in range(8):
        ids = [k for j, k in enumerate("abc") if m >> j & 1]
        vals[",".join(ids)] = sum(w[i] for i in ids)
    return tab(vals)


@pytest.fixture
def small_instances():
    return [random_instance(rng_for(11, "instance", i), max_agents=3, max_block=2) for i in range(30)]


@pytest.fixture
def write_json(tmp_path):
    def _write(name, obj):
        p = tmp_path / name
        p.write_text(json.dumps(obj))
        return str(p)
    return _write
