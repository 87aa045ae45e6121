import numpy as np
import pytest

from config import settings
from services import corpus, inductive


@pytest.fixture(autouse=True)
def restore_settings():
    """Undo per-test overrides of the settings singleton"""
    saved = dict(vars(settings))
    yield
    vars(settings).clear()
    vars(settings).update(saved)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def fresh_caches():
    inductive.clear_caches()
    yield
    inductive.clear_caches()


@pytest.fixture(scope="session")
def named_graphs():
    return {
        "P3": corpus.path_graph(3),
        "P4": corpus.path_graph(4),
        "P5": corpus.path_graph(5),
        "C3": corpus.cycle_graph(3),
        "C4": corpus.cycle_graph(4),
        "C5": corpus.cycle_graph(5),
        "C6": corpus.cycle_graph(6),
        "K4": corpus.complete_graph(4),
        "star3": corpus.star_graph(3),
    }


@pytest.fixture(scope="session")
def tiny_graphs():
    """Every graph with at most three vertices and up to two terminals"""
    return list(corpus.small_graphs(max_vertices=3, max_edges=3, max_type=2))
