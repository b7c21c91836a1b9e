"""CSV trace files: layout, bit-exact round-trips, and strict loading."""

from __future__ import annotations

import numpy as np
import pytest

from spinfid import FidTrace, NoiseModel, TimeGrid, evolve_fid
from spinfid.csvio import CsvFormatError, emit_trace_csv, load_csv, write_csv
from spinfid.states import apply_pulse, pps_state
from spinfid import PulseSpec, SpinSystemSpec


@pytest.fixture(scope="module")
def sample_trace():
    spec = SpinSystemSpec(polarization=1.0)
    return evolve_fid(
        spec,
        apply_pulse(pps_state(spec), PulseSpec(target=2)),
        NoiseModel("lorentzian", 28.0),
        TimeGrid(),
        n_realizations=50,
        seed=13,
    )


class TestLayout:
    def test_header_and_row_count(self, sample_trace, tmp_path):
        path = tmp_path / "trace.csv"
        emit_trace_csv(str(path), sample_trace)
        lines = path.read_text().splitlines()
        assert lines[0] == "t_s,mx,my,mperp"
        data = [ln for ln in lines[1:] if ln and not ln.startswith("#")]
        assert len(data) == 481

    def test_metadata_trails_data(self, sample_trace, tmp_path):
        path = tmp_path / "trace.csv"
        emit_trace_csv(str(path), sample_trace, metadata={"config_hash": "abc123"})
        lines = path.read_text().splitlines()
        tail = [ln for ln in lines if ln.startswith("#")]
        assert lines[-len(tail):] == tail  # all comments at the very end
        joined = "\n".join(tail)
        assert "seed = 13" in joined
        assert "n_realizations = 50" in joined
        assert "config_hash = abc123" in joined

    def test_oracle_column_naming(self, sample_trace, tmp_path):
        path = tmp_path / "trace.csv"
        oracle = np.linspace(0.5, 0.0, 481)
        emit_trace_csv(str(path), sample_trace, oracles={"pps": oracle})
        header = path.read_text().splitlines()[0]
        assert header == "t_s,mx,my,mperp,oracle_pps_mperp"

    def test_values_carry_full_precision(self, sample_trace, tmp_path):
        path = tmp_path / "trace.csv"
        emit_trace_csv(str(path), sample_trace)
        first_row = path.read_text().splitlines()[1].split(",")
        # repr-formatted floats reparse to the identical binary value
        assert float(first_row[1]) == sample_trace.mx[0]
        assert float(first_row[3]) == sample_trace.mperp[0]


class TestRoundTrip:
    def test_trace_round_trip_bit_exact(self, sample_trace, tmp_path):
        path = tmp_path / "trace.csv"
        emit_trace_csv(str(path), sample_trace)
        loaded = load_csv(str(path)).trace()
        assert np.array_equal(loaded.mx, sample_trace.mx)
        assert np.array_equal(loaded.my, sample_trace.my)
        assert np.array_equal(loaded.mperp, sample_trace.mperp)
        assert loaded.seed == sample_trace.seed
        assert loaded.n_realizations == sample_trace.n_realizations
        assert loaded.polarization == sample_trace.polarization
        assert loaded.grid.n_points == sample_trace.grid.n_points
        assert loaded.grid.t_max == pytest.approx(sample_trace.grid.t_max)

    def test_oracles_round_trip(self, sample_trace, tmp_path):
        path = tmp_path / "trace.csv"
        oracles = {
            "pps": np.linspace(0.5, 0.0, 481),
            "envelope": np.full(481, 0.25),
        }
        emit_trace_csv(str(path), sample_trace, oracles=oracles)
        back = load_csv(str(path)).oracles
        assert set(back) == {"pps", "envelope"}
        for name in oracles:
            assert np.array_equal(back[name], oracles[name])

    def test_generic_table_round_trip(self, tmp_path):
        path = tmp_path / "table.csv"
        m = np.array([1.0, 2.0, 5.0])
        r = np.array([0.02, 0.04, 0.09])
        write_csv(str(path), ["m", "residual"], [m, r], metadata={"note": "sweep"})
        data = load_csv(str(path))
        assert np.array_equal(data.columns["m"], m)
        assert np.array_equal(data.columns["residual"], r)
        assert data.metadata["note"] == "sweep"


class TestWriterValidation:
    def test_header_column_count_mismatch(self, tmp_path):
        with pytest.raises(ValueError):
            write_csv(str(tmp_path / "x.csv"), ["a", "b"], [np.zeros(3)])

    def test_ragged_columns_rejected(self, tmp_path):
        with pytest.raises(ValueError):
            write_csv(str(tmp_path / "x.csv"), ["a", "b"], [np.zeros(3), np.zeros(4)])

    def test_oracle_shape_mismatch(self, sample_trace, tmp_path):
        with pytest.raises(ValueError):
            emit_trace_csv(
                str(tmp_path / "x.csv"), sample_trace, oracles={"bad": np.zeros(5)}
            )


class TestLoaderValidation:
    def write_lines(self, tmp_path, lines):
        path = tmp_path / "bad.csv"
        path.write_text("\n".join(lines) + "\n")
        return str(path)

    def test_empty_file(self, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text("")
        with pytest.raises(CsvFormatError, match="empty"):
            load_csv(str(path))

    def test_duplicate_header_names(self, tmp_path):
        path = self.write_lines(tmp_path, ["t_s,mx,mx,mperp", "0.0,1.0,1.0,1.4"])
        with pytest.raises(CsvFormatError, match="duplicate"):
            load_csv(path)

    def test_non_numeric_field(self, tmp_path):
        path = self.write_lines(tmp_path, ["t_s,mx", "0.0,oops"])
        with pytest.raises(CsvFormatError, match="non-numeric"):
            load_csv(path)

    def test_field_count_mismatch(self, tmp_path):
        path = self.write_lines(tmp_path, ["t_s,mx", "0.0,1.0,2.0"])
        with pytest.raises(CsvFormatError, match="fields"):
            load_csv(path)

    def test_data_after_metadata_rejected(self, tmp_path):
        path = self.write_lines(
            tmp_path, ["t_s,mx", "0.0,1.0", "# seed = 1", "0.1,0.9"]
        )
        with pytest.raises(CsvFormatError, match="after metadata"):
            load_csv(path)

    def test_metadata_without_equals_rejected(self, tmp_path):
        path = self.write_lines(tmp_path, ["t_s,mx", "0.0,1.0", "# just a remark"])
        with pytest.raises(CsvFormatError, match="without"):
            load_csv(path)

    def test_trace_requires_all_columns(self, tmp_path):
        path = self.write_lines(tmp_path, ["t_s,mx", "0.0,1.0", "0.1,0.9"])
        with pytest.raises(CsvFormatError, match="missing columns"):
            load_csv(path).trace()

    def test_trace_magnitude_consistency_enforced(self, tmp_path):
        path = self.write_lines(
            tmp_path,
            ["t_s,mx,my,mperp", "0.0,1.0,0.0,1.0", "0.001,0.5,0.0,0.9"],
        )
        with pytest.raises(CsvFormatError, match="hypot"):
            load_csv(path).trace()

    def test_trace_time_axis_must_start_at_zero(self, tmp_path):
        path = self.write_lines(
            tmp_path,
            ["t_s,mx,my,mperp", "0.001,1.0,0.0,1.0", "0.002,0.5,0.0,0.5"],
        )
        with pytest.raises(CsvFormatError, match="start at 0"):
            load_csv(path).trace()

    def test_trace_time_axis_must_be_uniform(self, tmp_path):
        path = self.write_lines(
            tmp_path,
            [
                "t_s,mx,my,mperp",
                "0.0,1.0,0.0,1.0",
                "0.001,0.5,0.0,0.5",
                "0.005,0.25,0.0,0.25",
            ],
        )
        with pytest.raises(CsvFormatError, match="uniform"):
            load_csv(path).trace()

    def test_trace_needs_two_samples(self, tmp_path):
        path = self.write_lines(tmp_path, ["t_s,mx,my,mperp", "0.0,1.0,0.0,1.0"])
        with pytest.raises(CsvFormatError, match="two time samples"):
            load_csv(path).trace()
