from __future__ import annotations

import functools

import numpy as np
import pytest

from gkmquiver.fixtures import get_fixture
from gkmquiver.generators import random_straight_instance
from gkmquiver.gradings import attractive_aligned
from gkmquiver.moment_graph import build_moment_graph
from gkmquiver.quiver_core import is_straight

STRAIGHT_FIXTURES = ["fl_2", "fl_3", "fl_4", "a2_p1", "point"]
RANDOM_SEED = 20240611
N_RANDOM = 200


@functools.lru_cache(maxsize=None)
def prepared(name: str):
    """(instance, aligned basis, cocharacter, moment graph) for a fixture name."""
    inst = get_fixture(name)
    tree = not is_straight(inst.forest)
    align, chi = attractive_aligned(inst.quiver, inst.forest, inst.vertex_order, allow_trees=tree)
    g = build_moment_graph(inst.quiver, inst.forest, align, chi, inst.e)
    return inst, align, chi, g


@functools.lru_cache(maxsize=None)
def random_instances():
    rng = np.random.default_rng(RANDOM_SEED)
    return tuple(random_straight_instance(rng) for _ in range(N_RANDOM))


@functools.lru_cache(maxsize=None)
def random_acyclic_instances():
    rng = np.random.default_rng(RANDOM_SEED + 1)
    return tuple(random_straight_instance(rng, acyclic=True) for _ in range(N_RANDOM))


@functools.lru_cache(maxsize=None)
def random_prepared(k: int, acyclic: bool = False):
    inst = (random_acyclic_instances() if acyclic else random_instances())[k]
    align, chi = attractive_aligned(inst.quiver, inst.forest, inst.vertex_order)
    g = build_moment_graph(inst.quiver, inst.forest, align, chi, inst.e)
    return inst, align, chi, g


@pytest.fixture(params=["numba", "numpy"])
def kernel_path(request, monkeypatch):
    monkeypatch.setenv("GKMQUIVER_DISABLE_NUMBA", "1" if request.param == "numpy" else "0")
    return request.param


# -- acceptance reporting ------------------------------------------------------

ACCEPTANCE_RESULTS: dict[int, tuple[bool, str]] = {}


class criterion:
    """Record PASS/FAIL for one acceptance criterion; failures still propagate."""

    def __init__(self, number: int, text: str):
        self.number, self.text = number, text

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        ok = exc_type is None
        ACCEPTANCE_RESULTS[self.number] = (ok, self.text)
        print(f"[{'PASS' if ok else 'FAIL'}] criterion {self.number}: {self.text}")
        return False


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_RESULTS):
        ok, text = ACCEPTANCE_RESULTS[n]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {n}: {text}")
