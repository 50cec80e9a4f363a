import json
import math

import numpy as np

from spinmanifold.analytic import ManifoldSpec
from spinmanifold.spin_ops import SpinSystem
from spinmanifold.verify import (
    CheckResult,
    SweepGrid,
    run_full_suite,
    run_metric_equivalence,
    run_section7_vectors,
    run_speed_uncertainty_identity,
    run_topology_suite,
)


class TestIndividualChecks:
    def test_metric_equivalence_passes(self):
        sys = SpinSystem(3, 2)
        res = run_metric_equivalence(sys, SweepGrid.default(sys, n_theta=7, n_phi=3, n_chi=3))
        assert res.passed
        assert res.max_rel <= 1e-9

    def test_speed_identity_passes(self):
        sys = SpinSystem(2, 3)
        res = run_speed_uncertainty_identity(
            sys, SweepGrid.default(sys, n_theta=7, n_phi=3, n_chi=3)
        )
        assert res.passed

    def test_topology_suite_passes(self):
        specs = [ManifoldSpec.for_system(SpinSystem(n, t)) for n, t in [(2, 1), (3, 2)]]
        results = run_topology_suite(specs)
        assert all(r.passed for r in results)
        assert all(r.max_abs < 1e-3 for r in results)

    def test_section7_vectors_pass(self):
        assert run_section7_vectors().passed

    def test_default_grid_covers_poles(self):
        grid = SweepGrid.default(SpinSystem(2, 1))
        assert grid.theta[0] == 0.0
        assert grid.theta[-1] == math.pi
        assert grid.theta.size == 27


class TestFullSuite:
    def test_only_filter(self):
        report = run_full_suite(only="topology")
        assert report.entries
        assert all(e.name.startswith("topology") for e in report.entries)
        assert report.overall

    def test_tolerance_override_forces_failure(self):
        report = run_full_suite(only="topology", tolerance=1e-15)
        assert not report.overall

    def test_report_json_schema(self):
        report = run_full_suite(only="section7")
        rows = json.loads(report.to_json())
        assert rows
        for row in rows:
            assert set(row) == {"name", "grid", "max_abs", "max_rel", "tol", "pass"}
            assert row["pass"] is True

    def test_report_is_deterministic(self):
        a = run_full_suite(only="section7").to_json()
        b = run_full_suite(only="section7").to_json()
        assert a == b

    def test_format_table_lines(self):
        report = run_full_suite(only="topology")
        table = report.format_table()
        lines = table.splitlines()
        assert lines[-1] == "overall: PASS"
        assert sum("PASS" in ln for ln in lines[1:-1]) == len(report.entries)


class TestCheckResult:
    def test_pass_is_tolerance_comparison(self):
        assert CheckResult("x", "g", 1.0, 5e-10, 1e-9, True).passed
        res = run_metric_equivalence(
            SpinSystem(2, 1),
            SweepGrid.default(SpinSystem(2, 1), n_theta=3, n_phi=2, n_chi=2),
            tol=1e-16,
        )
        # exact zeros below the absolute floor never count against rel
        assert res.max_abs < 1e-12 or res.max_rel > 0
