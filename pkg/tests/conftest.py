from __future__ import annotations

import pytest

from trialkb.fixtures import FixtureServer, load_fixture_kb, registry_records, sites_root


@pytest.fixture(scope="session")
def fixture_server():
    server = FixtureServer(registry_records(), sites_root()).start()
    yield server
    server.stop()


@pytest.fixture()
def fixture_kb(fixture_server):
    return load_fixture_kb(base_url=fixture_server.base_url)


@pytest.fixture()
def offline_fixture_kb():
    return load_fixture_kb()
