import math

import pytest
from fastapi.testclient import TestClient

from heightlab.service.app import create_app


@pytest.fixture(scope="module")
def client():
    return TestClient(create_app())


MODEL = {"curve": {"a": "-16", "b": "16"}, "u": {"x": "0", "y": "4"}, "precision_bits": 128}


class TestInfo:
    def test_root(self, client):
        r = client.get("/")
        assert r.status_code == 200
        body = r.json()
        assert body["name"] == "heightlab"
        assert "/equidist" in body["endpoints"]


class TestHeightEndpoint:
    def test_gm_height_of_two(self, client):
        r = client.post("/height", json={"kind": "gm", "min_poly": "x - 2"})
        assert r.status_code == 200
        h = r.json()["heights"]
        assert abs(h["weil"] - math.log(2)) < 1e-12
        assert abs(h["toric_canonical"] - 2 * math.log(2)) < 1e-12

    def test_gm_height_json_coefficients(self, client):
        r = client.post("/height", json={"kind": "gm", "min_poly": [1, -1, -1]})
        assert r.status_code == 200
        assert r.json()["heights"]["weil"] > 0

    def test_elliptic_generator(self, client):
        r = client.post("/height", json={
            "kind": "elliptic", "curve": {"a": "-16", "b": "16"},
            "point": {"x": "0", "y": "4"},
        })
        assert r.status_code == 200
        body = r.json()
        assert abs(body["heights"]["neron_tate"] - 0.0255557) < 1e-5
        assert body["error_bound"] < 1e-6
        assert "neron_constant" in body["normalization"]

    def test_elliptic_torsion(self, client):
        r = client.post("/height", json={
            "kind": "elliptic", "curve": {"a": "-1", "b": "0"},
            "point": {"x": "0", "y": "0"},
        })
        assert r.json()["heights"]["neron_tate"] < 1e-8

    def test_identity(self, client):
        r = client.post("/height", json={
            "kind": "elliptic", "curve": {"a": "-1", "b": "0"}, "identity": True,
        })
        assert r.json()["heights"]["neron_tate"] == 0.0

    def test_fiber(self, client):
        r = client.post("/height", json={"kind": "fiber", "min_poly": "x - 2", "ladder_n": 4})
        assert abs(r.json()["heights"]["fiber_canonical"] - math.log(2) / 2) < 1e-12

    def test_point_not_on_curve_is_422(self, client):
        r = client.post("/height", json={
            "kind": "elliptic", "curve": {"a": "-16", "b": "16"},
            "point": {"x": "1", "y": "2"},
        })
        assert r.status_code == 422

    def test_singular_curve_is_422(self, client):
        r = client.post("/height", json={
            "kind": "elliptic", "curve": {"a": "-3", "b": "2"}, "identity": True,
        })
        assert r.status_code == 422

    def test_nonsquarefree_is_422(self, client):
        r = client.post("/height", json={"kind": "gm", "min_poly": "x^2 - 2x + 1"})
        assert r.status_code == 422


class TestEquidistEndpoint:
    def test_small_run(self, client):
        r = client.post("/equidist", json={
            "experiment": {"seed": 1},
            "model": MODEL,
            "orbits": {"group": "G", "kind": "primitive_torsion", "levels": [4, 8]},
            "functions": {"character_box": 1, "extra": ["hat(0.3,0.2,s)"]},
            "thresholds": {"max_gap": 0.25},
        })
        assert r.status_code == 200
        body = r.json()
        assert body["passed"]
        assert body["csv"].splitlines()[0].startswith("orbit_id,")
        assert body["report"]["config_sha256"]
        assert any("Galois" in a for a in body["report"]["assumptions"])

    def test_missing_levels_is_422(self, client):
        r = client.post("/equidist", json={
            "orbits": {"group": "G", "kind": "primitive_torsion", "levels": []},
        })
        assert r.status_code == 422

    def test_orbit_cap_is_422(self, client):
        r = client.post("/equidist", json={
            "experiment": {"orbit_cap": 10},
            "model": MODEL,
            "orbits": {"group": "G", "kind": "primitive_torsion", "levels": [8]},
            "functions": {"character_box": 1},
        })
        assert r.status_code == 422


class TestIsogenyEndpoint:
    def test_rows_and_witness_table(self, client):
        r = client.post("/isogeny-check", json={
            "model": MODEL,
            "n_list": [1, 2, 5],
            "samples": 8,
            "division_witness": {"x": "0", "y": "4"},
            "witness_n_list": [2, 3],
        })
        assert r.status_code == 200
        body = r.json()
        for row in body["rows"]:
            assert row["kernel_size"] == row["n"]
            assert row["lambda_scaling_residual"] < 1e-10
            assert row["kernel_maps_to_identity"]
        assert len(body["ladder_heights"]) == 2
        for row in body["ladder_heights"]:
            assert row["residual"] < 1e-6
        assert "out of scope" in body["ladder_note"]

    def test_branches(self, client):
        r = client.post("/isogeny-check", json={
            "model": MODEL, "n_list": [3], "branches": [[0, 0], [1, -1]], "samples": 4,
        })
        assert len(r.json()["rows"]) == 2


class TestMeasureEndpoint:
    def test_full_check(self, client):
        r = client.post("/measure-check", json={
            "model": MODEL, "quadrature_order": 64, "character_box": 2,
            "projection_n_max": 4, "ladder_levels": [1, 2], "mc_count": 20000,
        })
        assert r.status_code == 200
        body = r.json()
        assert abs(body["s1_mass"] - 2.0) < 1e-13
        assert body["character_max_abs"] < 1e-12
        assert body["projection_max_residual"] < 1e-12
        assert abs(body["re_squared_value"] - 1.0) < 1e-13
        assert body["ladder_rows"]

    def test_without_model(self, client):
        r = client.post("/measure-check", json={"quadrature_order": 32})
        assert r.status_code == 200
        assert r.json()["ladder_rows"] == []
