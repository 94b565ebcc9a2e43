import importlib.util
from pathlib import Path

import pytest

from eulercl.cl import shipped_modular_poly

TOOL = Path(__file__).resolve().parents[1] / "tools" / "gen_modpoly.py"


@pytest.fixture(scope="module")
def gen():
    spec = importlib.util.spec_from_file_location("gen_modpoly", TOOL)
    mod = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(mod)
    return mod


def test_j_series_leading_coefficients(gen):
    # j = 1/q + 744 + 196884 q + 21493760 q^2 + ...
    assert gen.j_series(3, None)[:5] == [1, 744, 196884, 21493760, 864299970]


@pytest.mark.parametrize("level", [2, 3, 5, 7])
def test_exact_regeneration(gen, level):
    assert gen.modular_polynomial(level) == shipped_modular_poly(level).coeffs


@pytest.mark.parametrize("level", [5, 13])
def test_reduced_mode_agrees_with_exact(gen, level):
    m = level ** 20
    exact = {k: c % m for k, c in shipped_modular_poly(level).coeffs.items() if c % m}
    assert gen.modular_polynomial(level, 20) == exact


def test_shipped_reduced_table_regenerates(gen):
    assert gen.modular_polynomial(17, 20) == shipped_modular_poly(17).coeffs


def test_write_table_roundtrip(gen, tmp_path):
    from eulercl.cl import load_modular_poly

    poly = gen.modular_polynomial(3)
    gen.write_table(tmp_path / "phi_3.txt", 3, poly, None)
    assert load_modular_poly(tmp_path / "phi_3.txt").coeffs == poly
