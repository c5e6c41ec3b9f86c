import json
import random

import pytest

from dprand.budget import BudgetSpec, Geolevel, compute_budget, us_2020_spec
from dprand.errors import InvalidSpec

# frozen from the independent arithmetic below (and a by-hand long multiplication)
US_TOTAL_CELLS = 18_912_317_834_592
US_TOTAL_BITS = 1_210_388_341_413_888


def small_spec(**overrides):
    kwargs = dict(
        person_hist_dims=[3, 4],
        unit_hist_dims=[2, 5],
        geolevels=[Geolevel("top", 2), Geolevel("leaf", 7)],
        bits_per_cell=64,
    )
    kwargs.update(overrides)
    return BudgetSpec(**kwargs)


class TestUnitCases:
    def test_single_cell_single_geounit(self):
        spec = BudgetSpec([1], [1], [Geolevel("only", 1)], bits_per_cell=64)
        report = compute_budget(spec)
        assert report.total_cells == 2
        assert report.total_bits == 128
        assert report.total_bytes == 16

    def test_us_2020_exact_product(self):
        report = compute_budget(us_2020_spec())
        assert report.total_cells == US_TOTAL_CELLS
        assert report.total_bits == US_TOTAL_BITS
        assert report.total_bytes == US_TOTAL_BITS // 8

    def test_us_2020_independent_arithmetic(self):
        # independent route: fold the factors by hand instead of calling the module
        hp = 1
        for d in (42, 2, 116, 2, 63):
            hp *= d
        hu = 1
        for d in (2, 9, 2, 7, 4, 2, 522):
            hu *= d
        geounits = 1 + 51 + 3143 + 73782 + 217550 + 8000000
        assert hp == 1_227_744 and hu == 1_052_352
        assert (hp + hu) * geounits == US_TOTAL_CELLS
        assert 64 * (hp + hu) * geounits == US_TOTAL_BITS

    def test_us_2020_terabytes_decimal(self):
        report = compute_budget(us_2020_spec())
        assert report.terabytes == report.total_bytes / 10**12
        assert 151.0 < report.terabytes < 152.0


class TestBruteForceOracle:
    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_cell_enumeration_matches(self, seed):
        rng = random.Random(seed)
        spec = BudgetSpec(
            person_hist_dims=[rng.randint(1, 6) for _ in range(3)],
            unit_hist_dims=[rng.randint(1, 5) for _ in range(2)],
            geolevels=[Geolevel(f"l{i}", rng.randint(1, 40)) for i in range(3)],
            bits_per_cell=rng.choice([8, 64]),
        )
        # count (histogram cell, geounit) pairs one at a time
        total = 0
        for level in spec.geolevels:
            for _unit in range(level.count):
                for _cell in range(spec.person_hist_cells):
                    total += 1
                for _cell in range(spec.unit_hist_cells):
                    total += 1
        assert total <= 10**6, "oracle domain guard"
        assert compute_budget(spec).total_cells == total


class TestInvariants:
    def test_linearity_in_bits_per_cell(self):
        rng = random.Random(9)
        for _ in range(10):
            dims_p = [rng.randint(1, 9) for _ in range(rng.randint(1, 4))]
            dims_u = [rng.randint(1, 9) for _ in range(rng.randint(1, 4))]
            levels = [Geolevel(f"g{i}", rng.randint(1, 1000)) for i in range(rng.randint(1, 5))]
            b = rng.randint(1, 128)
            single = compute_budget(BudgetSpec(dims_p, dims_u, levels, b))
            double = compute_budget(BudgetSpec(dims_p, dims_u, levels, 2 * b))
            assert double.total_bits == 2 * single.total_bits

    def test_additivity_over_geolevels(self):
        spec = us_2020_spec()
        total = compute_budget(spec).total_bits
        parts = sum(
            compute_budget(BudgetSpec(spec.person_hist_dims, spec.unit_hist_dims,
                                      [lvl], spec.bits_per_cell)).total_bits
            for lvl in spec.geolevels)
        assert parts == total

    def test_per_geolevel_breakdown_sums(self):
        report = compute_budget(us_2020_spec())
        assert sum(r["bits"] for r in report.per_geolevel_bits) == report.total_bits
        assert sum(r["cells"] for r in report.per_geolevel_bits) == report.total_cells


class TestValidation:
    def test_zero_dimension_rejected(self):
        with pytest.raises(InvalidSpec):
            small_spec(person_hist_dims=[3, 0])

    def test_zero_geounits_rejected(self):
        with pytest.raises(InvalidSpec):
            small_spec(geolevels=[Geolevel("bad", 0)])

    def test_empty_geolevels_rejected(self):
        with pytest.raises(InvalidSpec):
            small_spec(geolevels=[])

    def test_bad_bits_rejected(self):
        with pytest.raises(InvalidSpec):
            small_spec(bits_per_cell=0)

    def test_negative_extra_cells_rejected(self):
        with pytest.raises(InvalidSpec):
            small_spec(extra_cells_per_geolevel=-1)


class TestJsonInterface:
    def test_round_trip(self, tmp_path):
        doc = {
            "person_hist_dims": [42, 2, 116, 2, 63],
            "unit_hist_dims": [2, 9, 2, 7, 4, 2, 522],
            "geolevels": [{"name": "nation", "count": 1}, {"name": "blocks", "count": 8000000}],
            "bits_per_cell": 64,
            "extra_cells_per_geolevel": 0,
        }
        path = tmp_path / "spec.json"
        path.write_text(json.dumps(doc))
        spec = BudgetSpec.from_file(path)
        assert spec.person_hist_cells == 1_227_744
        assert spec.geolevels[1].count == 8_000_000

    def test_malformed_json_rejected(self):
        with pytest.raises(InvalidSpec):
            BudgetSpec.from_json("{not json")
        with pytest.raises(InvalidSpec):
            BudgetSpec.from_json('{"person_hist_dims": [1]}')

    def test_extra_cells_add_flat_per_geolevel(self):
        base = compute_budget(small_spec())
        extra = compute_budget(small_spec(extra_cells_per_geolevel=10))
        assert extra.total_cells == base.total_cells + 10 * 2  # two geolevels

    def test_report_serialization(self):
        report = compute_budget(small_spec())
        doc = report.to_dict()
        assert doc["schema"] == "dprand.budget/1"
        assert doc["total_bits"] == report.total_bits
        text = report.to_text()
        assert "total bits" in text and "leaf" in text
