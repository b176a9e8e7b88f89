import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from dantzig_adm import fileio

finite_elements = st.floats(-1e12, 1e12, allow_nan=False, allow_infinity=False)


class TestMatrixRoundTrip:
    @settings(max_examples=30, deadline=None)
    @given(
        a=hnp.arrays(
            np.float64,
            st.tuples(st.integers(1, 8), st.integers(1, 8)),
            elements=finite_elements,
        )
    )
    def test_matrix_round_trip_is_bitwise(self, a, tmp_path_factory):
        path = tmp_path_factory.mktemp("mm") / "a.mtx"
        fileio.write_matrix(path, a)
        assert np.array_equal(fileio.read_matrix(path), a)

    @settings(max_examples=30, deadline=None)
    @given(v=hnp.arrays(np.float64, st.integers(1, 40), elements=finite_elements))
    def test_vector_round_trip_is_bitwise(self, v, tmp_path_factory):
        path = tmp_path_factory.mktemp("mm") / "v.mtx"
        fileio.write_vector(path, v)
        assert np.array_equal(fileio.read_vector(path), v)

    def test_vector_rejects_matrix_input(self, tmp_path):
        with pytest.raises(ValueError):
            fileio.write_vector(tmp_path / "bad.mtx", np.zeros((2, 2)))

    def test_read_vector_rejects_wide_matrix(self, tmp_path):
        path = tmp_path / "wide.mtx"
        fileio.write_matrix(path, np.zeros((3, 2)))
        with pytest.raises(ValueError):
            fileio.read_vector(path)

    def test_missing_file_raises_oserror(self, tmp_path):
        with pytest.raises(OSError):
            fileio.read_matrix(tmp_path / "nope.mtx")


class TestManifest:
    def test_round_trip_preserves_floats_exactly(self, tmp_path):
        path = tmp_path / "manifest.txt"
        delta = 0.039617578263880814
        fileio.write_manifest(path, {"n": 720, "delta": delta, "design": "unit_columns"})
        loaded = fileio.read_manifest(path)
        assert int(loaded["n"]) == 720
        assert float(loaded["delta"]) == delta
        assert loaded["design"] == "unit_columns"

    def test_blank_lines_and_comments_ignored(self, tmp_path):
        path = tmp_path / "manifest.txt"
        path.write_text("# header\n\nn = 3\n  # more\nname = x\n")
        assert fileio.read_manifest(path) == {"n": "3", "name": "x"}

    def test_malformed_line_rejected(self, tmp_path):
        path = tmp_path / "manifest.txt"
        path.write_text("just words\n")
        with pytest.raises(ValueError):
            fileio.read_manifest(path)
