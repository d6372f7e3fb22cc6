"""Benchmark scenes, refinement sweeps, ensembles and the records format.

The shell scene has closed-form distances (cavity radius minus the escaped
part of the displacement), so sweep records can be checked without any
oracle; one oracle cross-check at moderate pitch guards the formula itself.
"""

import numpy as np
import numpy.testing as npt
import pytest

from hausdorff_grid import delta_closed_form, dh_oracle, external_additive_term
from hausdorff_grid.experiments import (
    CSV_HEADER,
    DEFAULT_H_2D,
    DEFAULT_H_3D,
    ENSEMBLE_H_2D,
    ENSEMBLE_H_3D,
    fit_order,
    randomized_ensemble,
    read_records_csv,
    records_csv_text,
    reference_bound,
    run_scene,
    scene_circle_in_ring,
    scene_grid,
    sweep_displacement,
    sweep_h,
    write_records_csv,
)


class TestSceneCircleInRing:
    def test_centred_scene(self):
        scene = scene_circle_in_ring(2, (0.0, 0.0))
        assert scene.d_exact == 8.0
        assert scene.witness == ((0.0, 0.0), (8.0, 0.0))
        assert scene.max_external_radius is None

    def test_small_displacement_keeps_origin_covered(self):
        scene = scene_circle_in_ring(2, (0.6, 0.0))
        assert scene.d_exact == 8.0
        assert scene.max_external_radius is None

    def test_displaced_scene(self):
        scene = scene_circle_in_ring(2, (0.0, 2.5))
        assert scene.d_exact == pytest.approx(6.5)
        npt.assert_allclose(scene.witness[0], (0.0, 1.5), atol=1e-12)
        npt.assert_allclose(scene.witness[1], (0.0, 8.0), atol=1e-12)
        assert scene.max_external_radius == pytest.approx(1.5)

    def test_3d_scene(self):
        scene = scene_circle_in_ring(3, (3.0, 0.0, 0.0))
        assert scene.dim == 3
        assert scene.d_exact == pytest.approx(6.0)
        assert scene.max_external_radius == pytest.approx(2.0)

    def test_rejects_mismatched_displacement(self):
        with pytest.raises(ValueError, match="displacement"):
            scene_circle_in_ring(2, (1.0, 0.0, 0.0))

    def test_formula_against_oracle(self):
        scene = scene_circle_in_ring(2, (2.5, 0.0))
        oracle = dh_oracle(scene.shape_a, scene.shape_b, gap=0.05)
        assert abs(oracle.dh - scene.d_exact) <= oracle.error_bound


class TestSceneGrid:
    def test_origin_sits_at_a_cell_centre(self):
        g = scene_grid(2, 0.25)
        pos = g.node_positions().reshape(-1, 2)
        nearest = np.min(np.abs(pos), axis=0)
        npt.assert_allclose(nearest, [0.125, 0.125], atol=1e-12)

    def test_hull_covers_the_scene(self):
        scene = scene_circle_in_ring(2, (2.5, 0.0))
        g = scene_grid(2, 0.3)
        assert g.covers(scene.shape_a)
        assert g.covers(scene.shape_b)

    def test_offset_shifts_origin_by_cell_fraction(self):
        base = scene_grid(2, 0.25)
        shifted = scene_grid(2, 0.25, offset_frac=(0.5, 0.25))
        npt.assert_allclose(
            np.array(shifted.origin) - np.array(base.origin),
            [0.125, 0.0625],
            atol=1e-15,
        )
        assert shifted.counts == base.counts

    @pytest.mark.parametrize("off", [(0.5,), (1.0, 0.0), (-0.1, 0.0)])
    def test_rejects_bad_offsets(self, off):
        with pytest.raises(ValueError, match="offset_frac"):
            scene_grid(2, 0.25, offset_frac=off)


class TestRunScene:
    def test_record_fields_and_always_bound(self):
        scene = scene_circle_in_ring(2, (2.5, 0.0))
        rec = run_scene(scene, 0.2, run_id=4, seed=9)
        assert (rec.run_id, rec.seed, rec.dim, rec.source) == (4, 9, 2, "exact_sd")
        assert rec.h == 0.2
        assert rec.displacement == (2.5, 0.0)
        assert rec.d_exact == pytest.approx(6.5)
        assert rec.delta == pytest.approx(rec.d_exact - rec.d_tilde, abs=1e-15)
        # The node scan stays below the true distance, and never by more
        # than a cell diagonal.
        assert 0.0 <= rec.delta <= np.sqrt(2.0) * 0.2 + 1e-12
        assert rec.bound_used == pytest.approx(reference_bound(scene, 2, 0.2))

    def test_fmm_source_lands_near_the_exact_field(self):
        scene = scene_circle_in_ring(2, (2.5, 0.0))
        rec = run_scene(scene, 0.2, source="fmm")
        assert rec.source == "fmm"
        # A marched field is not an exact distance, so the lower-bound sign
        # is no longer guaranteed; the defect stays within the march error.
        assert abs(rec.delta) <= np.sqrt(2.0) * 0.2 + 0.05

    def test_rejects_unknown_source(self):
        scene = scene_circle_in_ring(2, (2.5, 0.0))
        with pytest.raises(ValueError, match="source"):
            run_scene(scene, 0.2, source="nearest")


class TestReferenceBound:
    def test_centred_scene_uses_the_suitable_constant(self):
        scene = scene_circle_in_ring(2, (0.0, 0.0))
        assert reference_bound(scene, 2, 0.1) == pytest.approx(
            delta_closed_form(2) * 0.1
        )

    def test_displaced_scene_switches_to_the_quadratic_term(self):
        scene = scene_circle_in_ring(2, (2.5, 0.0))
        assert reference_bound(scene, 2, 0.2) == pytest.approx(
            external_additive_term(2, 1.5, 0.2)
        )

    def test_coarse_spacing_falls_back(self):
        scene = scene_circle_in_ring(2, (2.5, 0.0))
        assert reference_bound(scene, 2, 1.2) == pytest.approx(
            delta_closed_form(2) * 1.2
        )

    def test_monotone_in_displacement(self):
        near = scene_circle_in_ring(2, (1.5, 0.0))
        far = scene_circle_in_ring(2, (2.5, 0.0))
        assert reference_bound(far, 2, 0.1) <= reference_bound(near, 2, 0.1)


class TestFitOrder:
    def test_exact_quadratic_data(self):
        fit = fit_order([(0.4, 0.16), (0.2, 0.04), (0.1, 0.01), (0.05, 0.0)])
        assert fit.dropped == 1
        assert len(fit.points) == 3
        assert fit.slope == pytest.approx(2.0, abs=1e-12)
        assert fit.intercept == pytest.approx(0.0, abs=1e-12)

    def test_needs_three_positive_points(self):
        with pytest.raises(ValueError, match="three positive"):
            fit_order([(0.4, 0.1), (0.2, 0.0), (0.1, 0.0)])


class TestSweeps:
    def test_centred_sweep_is_first_order(self):
        # Cell-centred grids keep the witness half a diagonal from the
        # nearest node, so the defect is exactly sqrt(2)/2 * h.
        records, fit = sweep_h(2, (0.0, 0.0), [0.2, 0.1, 0.05])
        deltas = np.array([r.delta for r in records])
        npt.assert_allclose(deltas, np.sqrt(2.0) / 2.0 * np.array([0.2, 0.1, 0.05]))
        assert fit.slope == pytest.approx(1.0, abs=1e-10)

    def test_displaced_sweep_is_roughly_second_order(self):
        h_list = [float(h) for h in np.geomspace(0.2, 0.05, 5)]
        records, fit = sweep_h(2, (2.5, 0.0), h_list)
        assert [r.run_id for r in records] == list(range(5))
        assert fit.dropped == 0
        assert 1.4 <= fit.slope <= 2.9

    def test_displacement_sweep_covers_magnitudes(self):
        records = sweep_displacement(2, 0.2, [0.0, 1.0, 2.5])
        assert [r.displacement for r in records] == [
            (0.0, 0.0),
            (1.0, 0.0),
            (2.5, 0.0),
        ]
        assert records[0].d_exact == 8.0
        assert records[2].d_exact == pytest.approx(6.5)
        # Deeper displacement shrinks both the distance and the bound.
        assert records[2].bound_used <= records[0].bound_used + 1e-12


class TestRandomizedEnsemble:
    H_LIST = (0.4, 0.3, 0.2, 0.15, 0.1)

    def test_smoke_and_thread_determinism(self):
        rec1, fits1, hist1 = randomized_ensemble(
            2, runs=3, seed=5, h_list=self.H_LIST, threads=1
        )
        rec3, fits3, hist3 = randomized_ensemble(
            2, runs=3, seed=5, h_list=self.H_LIST, threads=3
        )
        assert rec1 == rec3
        assert fits1 == fits3
        npt.assert_array_equal(hist1[1], hist3[1])
        assert [r.run_id for r in rec1] == [0] * 5 + [1] * 5 + [2] * 5
        assert len(fits1) == 3
        assert int(np.sum(hist1[1])) == 3
        edges = hist1[0]
        npt.assert_allclose(np.diff(edges), 0.25, atol=1e-12)

    def test_records_respect_the_reference_bound(self):
        records, _, _ = randomized_ensemble(2, runs=3, seed=5, h_list=self.H_LIST)
        for rec in records:
            assert rec.delta <= rec.bound_used + 1e-12

    def test_default_h_lists(self):
        assert len(DEFAULT_H_2D) == 7 and len(DEFAULT_H_3D) == 5
        assert len(ENSEMBLE_H_2D) == 10 and len(ENSEMBLE_H_3D) == 10
        for hs in (DEFAULT_H_2D, DEFAULT_H_3D, ENSEMBLE_H_2D, ENSEMBLE_H_3D):
            assert all(a > b for a, b in zip(hs, hs[1:]))

    def test_rejects_bad_arguments(self):
        with pytest.raises(ValueError, match="dimensions 2 and 3"):
            randomized_ensemble(1, runs=1, seed=0)
        with pytest.raises(ValueError, match="one run"):
            randomized_ensemble(2, runs=0, seed=0)


class TestRecordsFormat:
    def test_header_is_frozen(self):
        assert CSV_HEADER == (
            "run_id,seed,dim,h,disp_x,disp_y,disp_z,d_exact,d_tilde,delta,bound,source"
        )

    def test_csv_round_trip(self, tmp_path):
        records = sweep_displacement(2, 0.3, [0.0, 2.5])
        path = tmp_path / "records.csv"
        write_records_csv(records, path)
        assert read_records_csv(path) == records
        assert path.read_bytes().decode() == records_csv_text(records)

    def test_gnuplot_variant(self, tmp_path):
        records = sweep_displacement(2, 0.3, [0.0, 2.5])
        path = tmp_path / "records.dat"
        write_records_csv(records, path, fmt="gnuplot")
        lines = path.read_text().splitlines()
        assert lines[0] == "# " + CSV_HEADER.replace(",", " ")
        assert len(lines) == 3
        assert len(lines[1].split()) == 12

    def test_rejects_unknown_format(self, tmp_path):
        with pytest.raises(ValueError, match="fmt"):
            write_records_csv([], tmp_path / "x.csv", fmt="tsv")

    def test_rejects_foreign_header(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("a,b,c\n1,2,3\n")
        with pytest.raises(ValueError, match="header"):
            read_records_csv(path)
