from __future__ import annotations

import pytest

from camsearch.env import Environment
from camsearch.fixtures import build_fixture_world
from camsearch.generate import WorldGenConfig, generate_world
from camsearch.sttg import build_sttg
from camsearch.tasks import gen_track1, gen_track2, gen_track3
from camsearch.topology import load_topology


@pytest.fixture(scope="session")
def factory_topology():
    return load_topology("factory")


@pytest.fixture(scope="session")
def university_topology():
    return load_topology("university")


@pytest.fixture(scope="session")
def fixture_world():
    return build_fixture_world()


@pytest.fixture(scope="session")
def fixture_sttg(fixture_world, factory_topology):
    return build_sttg(fixture_world, factory_topology)


@pytest.fixture(scope="session")
def fixture_tasks(fixture_world, fixture_sttg, factory_topology):
    return (
        gen_track1(fixture_world)
        + gen_track2(fixture_world, fixture_sttg, factory_topology)
        + gen_track3(fixture_world, fixture_sttg)
    )


@pytest.fixture(scope="session")
def fixture_env(fixture_world, fixture_tasks, factory_topology):
    return Environment(fixture_world, fixture_tasks,
                       topology=factory_topology)


@pytest.fixture(scope="session")
def small_world():
    return generate_world(WorldGenConfig("factory", 90, seed=7))


@pytest.fixture(scope="session")
def small_sttg(small_world, factory_topology):
    return build_sttg(small_world, factory_topology)
