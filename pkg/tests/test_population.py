import numpy as np
import pytest

from workrest.delegation import collective_capacity
from workrest.population import (
    Distribution,
    PopulationSpec,
    generate,
    load_csv,
    write_csv,
)


class TestLoadCsv:
    def test_two_row_file(self, tmp_path):
        path = tmp_path / "w.csv"
        path.write_text("worker_id,reputation,mu_max\n0,1.0,10\n1,0.5,4\n")
        pop = load_csv(str(path))
        assert [p.id for p in pop] == [0, 1]
        assert collective_capacity(pop) == 12.0

    def test_reputation_out_of_range(self, tmp_path):
        path = tmp_path / "w.csv"
        path.write_text("worker_id,reputation,mu_max\n2,1.5,3\n")
        with pytest.raises(ValueError, match=":2:"):
            load_csv(str(path))

    def test_header_only_rejected(self, tmp_path):
        path = tmp_path / "w.csv"
        path.write_text("worker_id,reputation,mu_max\n")
        with pytest.raises(ValueError, match="no worker rows"):
            load_csv(str(path))

    def test_bad_header_rejected(self, tmp_path):
        path = tmp_path / "w.csv"
        path.write_text("id,rep,cap\n0,1.0,10\n")
        with pytest.raises(ValueError, match="bad header"):
            load_csv(str(path))

    def test_duplicate_id_rejected(self, tmp_path):
        path = tmp_path / "w.csv"
        path.write_text("worker_id,reputation,mu_max\n0,1.0,10\n0,0.5,4\n")
        with pytest.raises(ValueError, match="duplicate"):
            load_csv(str(path))

    def test_malformed_row_reports_line_number(self, tmp_path):
        path = tmp_path / "w.csv"
        path.write_text("worker_id,reputation,mu_max\n0,1.0,10\nx,y,z\n")
        with pytest.raises(ValueError, match=":3:"):
            load_csv(str(path))

    def test_zero_capacity_row_rejected(self, tmp_path):
        path = tmp_path / "w.csv"
        path.write_text("worker_id,reputation,mu_max\n0,1.0,0\n")
        with pytest.raises(ValueError, match="mu_max"):
            load_csv(str(path))

    def test_preserves_file_order(self, tmp_path):
        path = tmp_path / "w.csv"
        path.write_text("worker_id,reputation,mu_max\n9,0.5,1\n2,0.25,2\n5,1.0,3\n")
        assert [p.id for p in load_csv(str(path))] == [9, 2, 5]


class TestRoundTrip:
    def test_write_then_load_is_identity(self, tmp_path):
        pop = generate(PopulationSpec(count=50, seed=11))
        path = tmp_path / "w.csv"
        write_csv(str(path), pop)
        assert load_csv(str(path)) == pop

    def test_write_is_deterministic(self, tmp_path):
        pop = generate(PopulationSpec(count=10, seed=3))
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        write_csv(str(a), pop)
        write_csv(str(b), pop)
        assert a.read_bytes() == b.read_bytes()


class TestGenerate:
    def test_constant_distributions(self):
        spec = PopulationSpec(
            count=3,
            reputation_dist=Distribution.constant(1.0),
            mu_max_dist=Distribution.constant(5),
            seed=0,
        )
        pop = generate(spec)
        assert len(pop) == 3
        assert all(p.reputation == 1.0 and p.mu_max == 5 for p in pop)
        assert collective_capacity(pop) == 15.0

    def test_same_spec_twice_identical(self):
        spec = PopulationSpec(count=100, seed=42)
        assert generate(spec) == generate(spec)

    def test_ids_are_sequential(self):
        pop = generate(PopulationSpec(count=5, seed=1))
        assert [p.id for p in pop] == [0, 1, 2, 3, 4]

    def test_default_reputation_mean(self):
        pop = generate(PopulationSpec(count=10_000, seed=1234))
        mean = float(np.mean([p.reputation for p in pop]))
        assert 0.74 <= mean <= 0.76

    def test_default_bounds(self):
        pop = generate(PopulationSpec(count=2000, seed=5))
        assert all(0.5 <= p.reputation <= 1.0 for p in pop)
        assert all(1 <= p.mu_max <= 10 for p in pop)
        assert {p.mu_max for p in pop} == set(range(1, 11))

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            PopulationSpec(count=0)
        with pytest.raises(ValueError):
            PopulationSpec(count=3, reputation_dist=Distribution.uniform(0.5, 1.5))
        with pytest.raises(ValueError):
            PopulationSpec(count=3, mu_max_dist=Distribution.constant(0))
