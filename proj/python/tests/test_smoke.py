import math

import numpy as np
import pytest

import vemhyper


def test_mesh_generation_covers_the_domain():
    for family in ["sq1", "dq2s", "ss", "iss", "vrn"]:
        mesh = vemhyper.generate_mesh(family, 2)
        assert mesh.vertices.shape == (mesh.num_vertices, 2)
        assert mesh.total_area() == pytest.approx(1.0, rel=1e-12)
    cook = vemhyper.generate_mesh("dq2s", 2, domain="cook")
    corners = np.array([[0, 0], [48, 44], [48, 60], [0, 44]], dtype=float)
    x, y = corners[:, 0], corners[:, 1]
    shoelace = 0.5 * abs(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))
    assert cook.total_area() == pytest.approx(shoelace, rel=1e-12)


def test_vpoly_roundtrip():
    mesh = vemhyper.generate_mesh("iss", 1)
    back = vemhyper.Mesh.from_vpoly(mesh.to_vpoly())
    assert back.num_elements == mesh.num_elements
    np.testing.assert_array_equal(back.vertices, mesh.vertices)


def test_material_is_stress_free_at_rest():
    for mat in [
        vemhyper.Material.neo_hookean(200, 0.3),
        vemhyper.Material.mooney_rivlin(200, 0.45),
        vemhyper.Material.ogden(200, -0.5),
    ]:
        assert mat.energy(np.eye(2)) == pytest.approx(0.0, abs=1e-12)
        assert np.abs(mat.stress(np.eye(2))).max() < 1e-10
        A = mat.tangent(np.eye(2))
        np.testing.assert_allclose(A, A.T, atol=1e-9)


def test_stress_matches_energy_difference():
    mat = vemhyper.Material.ogden(200, 0.3)
    F = np.array([[1.1, 0.2], [-0.05, 0.95]])
    P = mat.stress(F)
    h = 1e-6
    for i in range(2):
        for j in range(2):
            dF = np.zeros((2, 2))
            dF[i, j] = h
            fd = (mat.energy(F + dF) - mat.energy(F - dF)) / (2 * h)
            assert fd == pytest.approx(P[i, j], rel=1e-6)


def test_taylor_ratio():
    ratio = abs(vemhyper.taylor_lambda(200, -1.0) / vemhyper.taylor_lambda(200, 0.5))
    assert 4.9 <= ratio <= 5.2


def test_mvee_of_a_rectangle():
    pts = np.array([[-2.0, -1.0], [2.0, -1.0], [2.0, 1.0], [-2.0, 1.0]])
    e = vemhyper.mvee(pts)
    assert e["outer_radius"] / e["inner_radius"] == pytest.approx(2.0, rel=1e-6)
    assert e["area"] == pytest.approx(math.pi * 2 * math.sqrt(2) * math.sqrt(2), rel=1e-6)
    p = vemhyper.stab_params(pts, vemhyper.Material.neo_hookean(200, 0.3))
    assert p["beta"] == pytest.approx(math.sqrt(2.0), rel=1e-6)


def test_shear_run():
    out = vemhyper.run("problem = simple-shear\nmesh.family = ss\nmesh.N = 2\n")
    assert out["converged"]
    assert out["displacement"].shape == out["nodes"].shape
    assert out["probe"][0] > 0
    assert out["min_jacobian"] > 0
    assert dict(out["config"])["mesh.family"] == "ss"


def test_bad_config_raises_value_error():
    with pytest.raises(ValueError, match="line|:1"):
        vemhyper.run("material.model = rubber\n")


def test_small_study():
    res = vemhyper.study(
        "problem = simple-shear\nload = 1\nstudy.levels = 1, 2, 3\nreference.level = 4\n"
    )
    assert len(res["records"]) == 3
    assert all(r["converged"] for r in res["records"])
    assert res["slopes"][0]["slope"] > 0.5
    assert res["csv"].startswith("family,N,hbar")
