"""Dataset CSV schema, validation diagnostics and the packaged fixture."""

import pytest

from chainbinom import (
    DataError,
    DatasetFile,
    FINAL,
    HouseholdObservation,
    coronahouse_fixture,
    dumps_csv,
    load_csv,
    loads_csv,
    subset,
    write_csv,
)

GOOD = """id,s0,i0,infected,generations,variant,age
h1,3,1,2,2,nonvoc,34
h2,3,1,0,,alpha,41.5
h3,1,2,1,1,nonvoc,29
"""


class TestLoadCsv:
    def test_field_mapping(self):
        ds = loads_csv(GOOD)
        first = ds.records[0]
        assert (first.id, first.s0, first.i0, first.infected, first.horizon) == (
            "h1", 3, 1, 2, 2,
        )

    def test_empty_generations_means_final(self):
        ds = loads_csv(GOOD)
        assert ds.records[1].horizon is FINAL

    def test_covariate_typing(self):
        ds = loads_csv(GOOD)
        assert ds.covariate_names == ("variant", "age")
        assert ds.records[0].covariates["variant"] == "nonvoc"
        assert ds.records[1].covariates["age"] == 41.5  # numeric column

    def test_infected_exceeding_s0_names_row(self):
        bad = "id,s0,i0,infected,generations\nh1,3,1,2,\nh2,3,1,4,\n"
        with pytest.raises(DataError, match="row 3.*infected"):
            loads_csv(bad)

    def test_non_integer_field_names_column(self):
        bad = "id,s0,i0,infected,generations\nh1,x,1,0,\n"
        with pytest.raises(DataError, match="row 2.*s0"):
            loads_csv(bad)

    def test_zero_index_cases_rejected(self):
        bad = "id,s0,i0,infected,generations\nh1,3,0,0,\n"
        with pytest.raises(DataError, match="i0"):
            loads_csv(bad)

    def test_missing_covariate_cell(self):
        bad = "id,s0,i0,infected,generations,variant\nh1,3,1,0,,\n"
        with pytest.raises(DataError, match="variant"):
            loads_csv(bad)

    def test_header_required(self):
        with pytest.raises(DataError, match="header"):
            loads_csv("household,s0,i0\n")
        with pytest.raises(DataError):
            loads_csv("")

    def test_data_rows_required(self):
        with pytest.raises(DataError, match="no data rows"):
            loads_csv("id,s0,i0,infected,generations\n")

    def test_duplicate_ids_warn(self):
        text = "id,s0,i0,infected,generations\nh1,3,1,0,\nh1,2,1,1,\n"
        with pytest.warns(UserWarning, match="duplicate"):
            ds = loads_csv(text)
        assert len(ds) == 2

    def test_ragged_row_rejected(self):
        bad = "id,s0,i0,infected,generations\nh1,3,1\n"
        with pytest.raises(DataError, match="row 2"):
            loads_csv(bad)

    def test_file_round_trip(self, tmp_path):
        path = tmp_path / "households.csv"
        path.write_text(GOOD, encoding="utf-8")
        ds = load_csv(path)
        assert ds.path == str(path)
        assert len(ds) == 3


class TestWriteCsv:
    def test_round_trip_preserves_records(self, tmp_path):
        original = loads_csv(GOOD)
        path = tmp_path / "out.csv"
        write_csv(original, path)
        reloaded = load_csv(path)
        assert reloaded.records == original.records
        assert reloaded.covariate_names == original.covariate_names

    def test_dumps_final_as_empty_field(self):
        record = HouseholdObservation(id="a", s0=2, i0=1, infected=1, horizon=FINAL)
        text = dumps_csv([record])
        assert text.splitlines()[1] == "a,2,1,1,"


class TestSubset:
    def test_filters_by_string_value(self):
        ds = loads_csv(GOOD)
        nonvoc = subset(ds, {"variant": "nonvoc"})
        assert [r.id for r in nonvoc.records] == ["h1", "h3"]

    def test_unknown_covariate_rejected(self):
        ds = loads_csv(GOOD)
        with pytest.raises(DataError, match="unknown"):
            subset(ds, {"city": "oslo"})


class TestCoronahouseFixture:
    def test_totals(self):
        ds = coronahouse_fixture()
        assert len(ds.records) == 52
        assert sum(r.s0 + r.i0 for r in ds.records) == 166

    def test_variant_counts(self):
        ds = coronahouse_fixture()
        assert len(subset(ds, {"variant": "nonvoc"}).records) == 38
        assert len(subset(ds, {"variant": "alpha"}).records) == 14

    def test_two_index_case_cell(self):
        ds = coronahouse_fixture()
        cell = [
            r
            for r in ds.records
            if r.covariates["variant"] == "alpha" and r.i0 == 2 and r.infected == 2
        ]
        assert len(cell) == 1
        assert cell[0].s0 == 2  # household of four with two index cases

    def test_all_outbreaks_fully_observed(self):
        assert all(r.horizon is FINAL for r in coronahouse_fixture().records)

    def test_unique_ids(self):
        ids = [r.id for r in coronahouse_fixture().records]
        assert len(set(ids)) == 52

    def test_is_a_dataset_file(self):
        ds = coronahouse_fixture()
        assert isinstance(ds, DatasetFile)
        assert ds.covariate_names == ("variant",)
