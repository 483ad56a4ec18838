"""Sellmeier model against the published index/group-index table."""

import math

import pytest

from spdclab import DEFAULT_REFERENCE_TABLE, MaterialModel, SPEED_OF_LIGHT
from spdclab.errors import InputDomainError

PUMP = 405e-9
DOWN = 810e-9


@pytest.fixture(scope="module")
def material():
    return MaterialModel()


def test_ordinary_indices_match_table(material):
    assert material.index(PUMP, "o") == pytest.approx(1.691719, abs=5e-3)
    assert material.index(DOWN, "o") == pytest.approx(1.659984, abs=5e-3)


def test_effective_extraordinary_indices_match_table(material):
    # e-branch means "e-ray at the cut angle", not the principal value
    assert material.index(PUMP, "e") == pytest.approx(1.659273, abs=5e-3)
    assert material.index(DOWN, "e") == pytest.approx(1.632171, abs=5e-3)


def test_group_indices_match_table(material):
    assert material.group_index(PUMP, "o") == pytest.approx(1.77878, abs=5e-3)
    assert material.group_index(PUMP, "e") == pytest.approx(1.73901, abs=5e-3)
    assert material.group_index(DOWN, "o") == pytest.approx(1.68376, abs=5e-3)
    assert material.group_index(DOWN, "e") == pytest.approx(1.65483, abs=5e-3)


def test_all_eight_table_deviations_within_tolerance(material):
    deviations = material.table_deviations()
    assert len(deviations) == 8
    assert max(deviations.values()) < 5e-3


def test_principal_extraordinary_below_ordinary(material):
    # negative uniaxial crystal
    for lam in (PUMP, DOWN, 500e-9, 700e-9):
        assert material.principal_index(lam, "e") < material.index(lam, "o")


def test_effective_index_between_principal_values(material):
    n_o = material.index(PUMP, "o")
    n_e = material.principal_index(PUMP, "e")
    n_eff = material.index(PUMP, "e")
    assert n_e < n_eff < n_o


def test_group_index_exceeds_phase_index_in_normal_dispersion(material):
    for branch in ("o", "e"):
        for lam in (PUMP, DOWN):
            assert material.group_index(lam, branch) > material.index(lam, branch)


def test_group_velocity_is_c_over_group_index(material):
    v = material.group_velocity(DOWN, "o")
    assert v == pytest.approx(SPEED_OF_LIGHT / material.group_index(DOWN, "o"), rel=1e-12)
    assert SPEED_OF_LIGHT / 3 < v < SPEED_OF_LIGHT


def test_wavenumber_definition(material):
    k = material.wavenumber(DOWN, "o")
    assert k == pytest.approx(2 * math.pi * material.index(DOWN, "o") / DOWN, rel=1e-12)


def test_validity_window_enforced(material):
    with pytest.raises(InputDomainError):
        material.index(0.20e-6, "o")
    with pytest.raises(InputDomainError):
        material.index(1.5e-6, "o")


def test_unknown_branch_rejected(material):
    with pytest.raises(InputDomainError):
        material.index(PUMP, "x")


def test_from_mapping_overrides_and_defaults():
    custom = MaterialModel.from_mapping(
        {
            "sellmeier": {"o": [2.7359, 0.01878, 0.01822, 0.01354]},
            "cut_angle_deg": 29.234,
            "reference_table": {
                "pump_o": {"n": 1.691719, "group_index": 1.77878},
                "pump_e": {"n": 1.659273, "group_index": 1.73901},
                "downconv_o": {"n": 1.659984, "group_index": 1.68376},
                "downconv_e": {"n": 1.632171, "group_index": 1.65483},
            },
        }
    )
    assert custom.cut_angle_deg == 29.234
    assert custom.reference_table.pump_o.index == 1.691719
    base = MaterialModel()
    assert custom.index(PUMP, "o") == pytest.approx(base.index(PUMP, "o"), rel=1e-12)


def test_default_reference_table_entry_lookup():
    entry = DEFAULT_REFERENCE_TABLE.entry("downconv", "e")
    assert entry.index == 1.632171
    assert entry.group_index == 1.65483


def test_cut_angle_tuned_for_noncollinear_type_i(material):
    # e-pump index sits just below the o-index of the pair: the small
    # deficit is what opens the 3 degree emission cone
    n_pump_e = material.index(PUMP, "e")
    n_down_o = material.index(DOWN, "o")
    assert n_pump_e < n_down_o
    assert n_down_o - n_pump_e < 2e-3
    assert math.degrees(material.cut_angle_rad) == pytest.approx(29.234, abs=0.5)
