import numpy as np
import pytest

from curlflux import fields as flds
from curlflux import geometry as geo
from curlflux import selection as sel


def test_line_vortex_transversal_maximal(line_vortex, unit_cylinder, cylinder_collar):
    # shells around shifted disks always contain an axis segment of length 2 eps
    man = geo.disk_manifold((0, 0, 0), 1.0)
    scan = sel.maximal_transversal(line_vortex.curl, man, cylinder_collar,
                                   t_grid=[0.1, 0.25, 0.4])
    assert np.abs(np.asarray(scan.values) - 2.0).max() < 1e-10


def test_one_sided_below_two_sided(line_vortex, cylinder_collar):
    man = geo.disk_manifold((0, 0, 0), 1.0)
    t_grid = [0.1, 0.25, 0.4]
    two = sel.maximal_transversal(line_vortex.curl, man, cylinder_collar, t_grid)
    plus = sel.maximal_transversal(line_vortex.curl, man, cylinder_collar, t_grid,
                                   variant="plus")
    minus = sel.maximal_transversal(line_vortex.curl, man, cylinder_collar, t_grid,
                                    variant="minus")
    for a, b, c in zip(plus.values, minus.values, two.values):
        assert a <= c + 1e-12 and b <= c + 1e-12


def test_concentrated_sheet_flagged(cylinder_collar):
    sheet = flds.SheetPart(
        geo.disk_patch((0, 0, 0.25), 1.0),
        lambda pts: np.broadcast_to(np.array([0.0, 1.0, 0.0]),
                                    (np.atleast_2d(pts).shape[0], 3)).copy())
    mu = flds.CurlMeasure(sheet_parts=(sheet,))
    man = geo.disk_manifold((0, 0, 0), 1.0)
    scan = sel.maximal_transversal(mu, man, cylinder_collar, t_grid=[0.1, 0.25, 0.4])
    assert np.isinf(scan.values[1])
    assert np.isfinite(scan.values[0]) and np.isfinite(scan.values[2])
    # layer vanishing: finite maximal value means zero single-layer mass
    slide = cylinder_collar.slide_for(man.patch)
    assert sel.single_layer_mass(mu, slide, 0.1) == 0.0
    assert sel.single_layer_mass(mu, slide, 0.25) > 3.0


def test_zero_measure_scan(cylinder_collar):
    man = geo.disk_manifold((0, 0, 0), 1.0)
    scan = sel.maximal_transversal(flds.ZERO_MEASURE, man, cylinder_collar,
                                   t_grid=[0.1, 0.3])
    assert max(scan.values) == 0.0
    rep = sel.good_set_scan(scan, 0.5)
    assert rep.complement_measure == 0.0 and rep.holds


def test_tangential_maximal_uniform_density(unit_disk_manifold, unit_disk_collar):
    ind = lambda pts: ((np.hypot(pts[:, 0], pts[:, 1]) < 1.0).astype(float)[:, None]
                       * np.array([1.0, 0.0, 0.0]))
    t_grid = [0.1, 0.2, 0.3]
    scan = sel.maximal_tangential(ind, unit_disk_manifold, unit_disk_collar, t_grid)
    for t, v in zip(scan.t_grid, scan.values):
        assert abs(v - 4 * np.pi * (1 - t)) < 2e-2 * 4 * np.pi


def test_annuli_trace_finite_maximal(annuli, unit_disk_manifold, unit_disk_collar):
    # bounded data has finite layer maximal values even where the localizer
    # limit fails: the scan is necessary, not sufficient
    scan = sel.maximal_tangential(annuli.trace_z_plane, unit_disk_manifold,
                                  unit_disk_collar, t_grid=[0.0, 0.1, 0.25],
                                  breaks=[2.0 ** -k for k in range(1, 12)])
    assert np.all(np.isfinite(scan.values))
    assert max(scan.values) <= 4.0 * np.pi + 1e-6  # |data| <= 1 on the unit disk


def test_weak11_line_vortex(line_vortex, cylinder_collar):
    man = geo.disk_manifold((0, 0, 0), 1.0)
    scan = sel.maximal_transversal(line_vortex.curl, man, cylinder_collar,
                                   t_grid=np.linspace(0.05, 0.45, 9))
    rep = sel.good_set_scan(scan, 3.0)
    assert rep.complement_measure == 0.0  # M == 2 <= 3 everywhere
    assert rep.holds


def test_weak11_all_catalog(line_vortex, rigid_rotation, newtonian, cylinder_collar):
    man = geo.disk_manifold((0, 0, 0), 1.0)
    t_grid = np.linspace(0.02, 0.48, 24)
    for entry in (line_vortex, rigid_rotation, newtonian):
        scan = sel.maximal_transversal(entry.curl, man, cylinder_collar, t_grid)
        for lam in [2.0 ** k for k in range(-4, 5)]:
            assert sel.good_set_scan(scan, lam).holds
