import numpy as np
import pytest

from workrest.population import PopulationSpec, generate
from workrest.sweep import (
    SWEEP_HEADER,
    SweepRow,
    SweepSpec,
    aggregate_report,
    parse_sweep_csv,
    report_rows_to_csv,
    run_sweep,
    sweep_rows_to_csv,
)


@pytest.fixture(scope="module")
def tiny_population():
    return generate(PopulationSpec(count=12, seed=3))


def tiny_spec(**overrides):
    base = dict(
        policies=("me", "cpl"),
        phi_grid=(5.0, 100.0),
        sigma_grid=(5.0,),
        theta1_grid=(0.5,),
        theta2_grid=(0.5,),
        lf_grid=(0.1, 0.9),
        slots=40,
        seed=11,
        deadline=3,
    )
    base.update(overrides)
    return SweepSpec(**base)


class TestGrid:
    def test_row_count_includes_me_normalizer(self, tiny_population):
        rows = run_sweep(tiny_spec(), tiny_population)
        # CPL: 2 phis x 2 lfs, plus ME at each lf
        assert len(rows) == 6
        assert [r.policy for r in rows] == ["me", "me", "cpl", "cpl", "cpl", "cpl"]

    def test_me_rows_self_normalize_to_100(self, tiny_population):
        rows = run_sweep(tiny_spec(), tiny_population)
        for r in rows:
            if r.policy == "me":
                assert r.effort_pct_of_me == 100.0
                assert r.completion_pct_of_me == 100.0

    def test_grid_order_is_deterministic(self, tiny_population):
        a = run_sweep(tiny_spec(), tiny_population)
        b = run_sweep(tiny_spec(), tiny_population)
        assert a == b

    def test_parallel_equals_serial(self, tiny_population):
        serial = run_sweep(tiny_spec(), tiny_population, jobs=1)
        parallel = run_sweep(tiny_spec(), tiny_population, jobs=2)
        assert serial == parallel
        assert sweep_rows_to_csv(serial) == sweep_rows_to_csv(parallel)

    def test_policy_validation(self):
        with pytest.raises(ValueError):
            SweepSpec(policies=("me", "xx"))
        with pytest.raises(ValueError):
            SweepSpec(policies=("cpl",), phi_grid=())
        with pytest.raises(ValueError):
            SweepSpec(lf_grid=())
        with pytest.raises(ValueError):
            SweepSpec(lf_grid=(0.0, 0.5))
        with pytest.raises(ValueError):
            SweepSpec(theta1_grid=(1.5,))
        with pytest.raises(ValueError):
            SweepSpec(phi_grid=(0.0,))

    def test_zero_workload_points_emit_na_percentages(self):
        # omega=1 at lf=0.05 rounds to zero tasks per slot: the ME baseline
        # averages are zero, so the relative columns carry the NA sentinel.
        from workrest.workers import WorkerProfile

        pop = [WorkerProfile(id=0, reputation=1.0, mu_max=1)]
        rows = run_sweep(tiny_spec(lf_grid=(0.05,), slots=20), pop)
        assert all(r.effort_pct_of_me is None for r in rows)
        assert all(r.completion_pct_of_me is None for r in rows)
        text = sweep_rows_to_csv(rows)
        assert text.splitlines()[1].endswith("NA,NA")
        # and the NA sentinel survives a parse round trip
        reparsed = parse_sweep_csv(text)
        assert all(r.effort_pct_of_me is None for r in reparsed)

    def test_failing_point_is_named(self, tiny_population, monkeypatch):
        import workrest.sweep as sweep_mod

        def boom(config, population, keep_reports=True, **kw):
            raise ArithmeticError("kaput")

        monkeypatch.setattr(sweep_mod, "run", boom)
        with pytest.raises(RuntimeError, match=r"policy=me.*lf=0.1.*kaput"):
            run_sweep(tiny_spec(), tiny_population)

    def test_diagnostics_collection(self, tiny_population):
        rows, diags = run_sweep(tiny_spec(), tiny_population, collect_diagnostics=True)
        assert len(diags) == len(rows)
        assert all(d.conserves_tasks for d in diags)
        assert all(d.stability_ok for d in diags)
        assert sum(d.drift_violations for d in diags) == 0


class TestCsvRoundTrip:
    def test_header_and_parse(self, tiny_population):
        rows = run_sweep(tiny_spec(), tiny_population)
        text = sweep_rows_to_csv(rows)
        assert text.splitlines()[0] == ",".join(SWEEP_HEADER)
        parsed = parse_sweep_csv(text)
        assert len(parsed) == len(rows)
        for original, reparsed in zip(rows, parsed):
            assert reparsed.policy == original.policy
            assert reparsed.effort_avg == pytest.approx(original.effort_avg, abs=1e-6)

    def test_six_decimal_formatting(self, tiny_population):
        rows = run_sweep(tiny_spec(), tiny_population)
        line = sweep_rows_to_csv(rows).splitlines()[1]
        fields = line.split(",")
        assert fields[0] == "me"
        for value in fields[2:]:
            whole, _, frac = value.partition(".")
            assert len(frac) == 6

    def test_bad_header_rejected(self):
        with pytest.raises(ValueError, match="header"):
            parse_sweep_csv("a,b,c\n1,2,3\n")

    def test_empty_file_rejected(self):
        with pytest.raises(ValueError, match="no data"):
            parse_sweep_csv(",".join(SWEEP_HEADER) + "\n")


def mkrow(policy, effort_pct, completion_pct, expiry=0.1):
    return SweepRow(
        policy=policy, knob_name="phi", knob_value=5.0, load_factor=0.5,
        effort_avg=0.5, expiry_avg=expiry, completion_avg=0.5,
        effort_pct_of_me=effort_pct, completion_pct_of_me=completion_pct,
    )


class TestReport:
    def test_hand_built_ratio(self):
        rows = [mkrow("cpl", 50.0, 75.0), mkrow("cpl", 50.0, 75.0)]
        (report,) = aggregate_report(rows)
        assert report.superlinearity_ratio == 1.5
        assert report.region == "superlinear"

    def test_linear_diagonal(self):
        rows = [mkrow("mt", 40.0, 40.0), mkrow("mt", 60.0, 60.0)]
        (report,) = aggregate_report(rows)
        assert report.superlinearity_ratio == 1.0
        assert report.region == "linear"

    def test_sublinear_flag(self):
        rows = [mkrow("mw", 80.0, 60.0)]
        (report,) = aggregate_report(rows)
        assert report.superlinearity_ratio == 0.75
        assert report.region == "sublinear"

    def test_na_rows_are_skipped_in_pct_means(self):
        rows = [mkrow("cpl", None, None, expiry=0.2), mkrow("cpl", 50.0, 60.0)]
        (report,) = aggregate_report(rows)
        assert report.mean_effort_pct_of_me == 50.0
        assert report.mean_expiry_avg == pytest.approx(0.15)

    def test_all_na_yields_na_report(self):
        rows = [mkrow("cpl", None, None)]
        (report,) = aggregate_report(rows)
        assert report.superlinearity_ratio is None
        assert report.region == "na"
        assert "NA" in report_rows_to_csv([report])

    def test_aggregates_equal_direct_means(self, tiny_population):
        rows = run_sweep(tiny_spec(), tiny_population)
        parsed = parse_sweep_csv(sweep_rows_to_csv(rows))
        reports = {r.policy: r for r in aggregate_report(parsed)}
        for policy in ("me", "cpl"):
            group = [r for r in parsed if r.policy == policy]
            assert reports[policy].mean_expiry_avg == float(
                np.mean([r.expiry_avg for r in group])
            )
            assert reports[policy].mean_effort_pct_of_me == float(
                np.mean([r.effort_pct_of_me for r in group])
            )
