"""Immersion and normal from the frame family, su(2) conversions, tangents."""

import numpy as np
import pytest

import psfront as pf
from psfront.sym import E1, E2, E3, StructureError


def test_su2_basis_maps_to_standard_basis():
    np.testing.assert_allclose(pf.su2_to_r3(E1), [1, 0, 0], atol=1e-15)
    np.testing.assert_allclose(pf.su2_to_r3(E2), [0, 1, 0], atol=1e-15)
    np.testing.assert_allclose(pf.su2_to_r3(E3), [0, 0, 1], atol=1e-15)
    np.testing.assert_allclose(pf.su2_to_r3(np.zeros((2, 2))), 0.0, atol=1e-15)


def test_commutator_maps_to_cross_product():
    np.testing.assert_allclose(
        pf.su2_to_r3(E1 @ E2 - E2 @ E1), [0, 0, 1], atol=1e-15)
    rng = np.random.default_rng(1)
    a, b = rng.normal(size=3), rng.normal(size=3)
    A = a[0] * E1 + a[1] * E2 + a[2] * E3
    B = b[0] * E1 + b[1] * E2 + b[2] * E3
    np.testing.assert_allclose(
        pf.su2_to_r3(A @ B - B @ A), np.cross(a, b), atol=1e-13)


def test_su2_structure_is_enforced():
    with pytest.raises(StructureError):
        pf.su2_to_r3(np.eye(2))                     # Hermitian, nonzero trace
    with pytest.raises(StructureError):
        pf.su2_to_r3(np.array([[1j, 0], [0, 1j]]))  # anti-Hermitian, traceful


def test_lambda_must_be_positive(ps_run):
    with pytest.raises(ValueError):
        pf.sym_immersion(ps_run.field, 0.0)
    with pytest.raises(ValueError):
        pf.sym_immersion(ps_run.field, -1.0)


def test_structure_tolerance_can_force_failure(ps_run):
    with pytest.raises(StructureError):
        pf.sym_immersion(ps_run.field, 1.0, structure_tol=1e-30)


def test_origin_anchors(ps_run):
    S = ps_run.surfaces[1.0]
    assert np.abs(S.f[S.i0x, S.i0y]).max() < 1e-13
    np.testing.assert_allclose(S.N[S.i0x, S.i0y], [0, 0, 1], atol=1e-13)


def test_normal_is_unit(ps_run):
    for S in ps_run.surfaces.values():
        norms = np.linalg.norm(S.N, axis=-1)
        assert np.abs(norms - 1.0).max() < 1e-12


def test_tangent_lengths_scale_with_lambda(ps_run, kink_run):
    for run in (ps_run, kink_run):
        for lam, S in run.surfaces.items():
            E = np.einsum("ijk,ijk->ij", S.fx, S.fx)
            G = np.einsum("ijk,ijk->ij", S.fy, S.fy)
            assert np.abs(E - lam ** 2).max() < 1e-12
            assert np.abs(G - lam ** -2).max() < 1e-12


def test_tangents_orthogonal_to_normal(ps_run):
    S = ps_run.surfaces[1.0]
    assert np.abs(np.einsum("ijk,ijk->ij", S.fx, S.N)).max() < 1e-13
    assert np.abs(np.einsum("ijk,ijk->ij", S.fy, S.N)).max() < 1e-13


def test_cross_product_law(ps_run):
    S = ps_run.surfaces[1.0]
    cross = np.cross(S.fx, S.fy)
    target = np.sin(ps_run.omega)[..., None] * S.N
    assert np.abs(cross - target).max() < 1e-6


def test_analytic_tangents_match_finite_differences(ps_run):
    S = ps_run.surfaces[1.0]
    fd = np.gradient(S.f, ps_run.h, axis=0)
    assert np.abs(fd - S.fx)[2:-2].max() < 1e-3


def test_vacuum_surface_is_a_line(vacuum_run):
    X, Y = np.meshgrid(vacuum_run.x, vacuum_run.y, indexing="ij")
    for lam, S in vacuum_run.surfaces.items():
        line = lam * X + Y / lam
        target = np.stack([line, np.zeros_like(line), np.zeros_like(line)], -1)
        assert np.abs(S.f - target).max() < 1e-3


def test_vacuum_tangent_is_constant(vacuum_run):
    S = vacuum_run.surfaces[1.0]
    assert np.abs(S.fx - np.array([1.0, 0.0, 0.0])).max() < 1e-10


def test_surface_grid_carries_metadata(ps_run):
    S = ps_run.surfaces[2.0]
    assert S.lam0 == 2.0
    assert S.conn is ps_run.conn
    assert S.f.shape == (129, 129, 3)
    assert np.array_equal(S.x, ps_run.field.x)
