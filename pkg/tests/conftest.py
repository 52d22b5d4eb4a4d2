"""Shared fixtures: the heavy default-grid maps are built once per session."""

import pytest

import pmhybrid as pm


@pytest.fixture(scope="session")
def cal_params():
    return pm.calibrated_params()


@pytest.fixture(scope="session")
def fwd_map(cal_params):
    return pm.build_maps(cal_params, direction="forward")


@pytest.fixture(scope="session")
def rev_map(cal_params):
    return pm.build_maps(cal_params, direction="reverse")


@pytest.fixture(scope="session")
def default_map():
    return pm.build_maps(pm.default_params(), direction="forward")
