import io

import numpy as np
import pytest
import scipy.io
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from sparselae.errors import InvalidArgumentError, ParseError
from sparselae.io import format_matrix, infer_format, load_matrix, parse_csv, parse_matrix_market, save_matrix


class TestCsv:
    def test_identity(self):
        np.testing.assert_array_equal(parse_csv("1,0\n0,1"), np.eye(2))

    def test_whitespace_and_blank_lines(self):
        np.testing.assert_array_equal(parse_csv(" 1 , 2\n\n3,4 \n"), [[1, 2], [3, 4]])

    def test_scientific(self):
        np.testing.assert_array_equal(parse_csv("1e-3,-2.5E2"), [[1e-3, -250.0]])

    def test_ragged(self):
        with pytest.raises(ParseError) as info:
            parse_csv("1,2\n3,4\n5\n")
        assert info.value.line == 3

    def test_non_numeric(self):
        with pytest.raises(ParseError) as info:
            parse_csv("1,2\nx,4\n")
        assert info.value.line == 2
        assert "line 2" in str(info.value)

    def test_non_finite(self):
        with pytest.raises(ParseError):
            parse_csv("1,nan\n")

    def test_empty(self):
        with pytest.raises(ParseError):
            parse_csv("\n\n")


class TestMatrixMarket:
    def test_array_column_major(self):
        text = "%%MatrixMarket matrix array real general\n% comment\n3 2\n1\n2\n3\n4\n5\n6\n"
        np.testing.assert_array_equal(parse_matrix_market(text), parse_csv("1,4\n2,5\n3,6"))

    def test_coordinate_general(self):
        text = "%%MatrixMarket matrix coordinate real general\n2 3 2\n1 1 1.5\n2 3 -2\n"
        np.testing.assert_array_equal(parse_matrix_market(text), [[1.5, 0, 0], [0, 0, -2]])

    def test_coordinate_symmetric(self):
        text = "%%MatrixMarket matrix coordinate real symmetric\n3 3 3\n1 1 2\n2 1 5\n3 2 7\n"
        np.testing.assert_array_equal(parse_matrix_market(text), [[2, 5, 0], [5, 0, 7], [0, 7, 0]])

    def test_array_symmetric(self):
        text = "%%MatrixMarket matrix array real symmetric\n2 2\n1\n2\n3\n"
        np.testing.assert_array_equal(parse_matrix_market(text), [[1, 2], [2, 3]])

    def test_pattern(self):
        text = "%%MatrixMarket matrix coordinate pattern general\n2 2 1\n2 1\n"
        np.testing.assert_array_equal(parse_matrix_market(text), [[0, 0], [1, 0]])

    def test_integer_field(self):
        text = "%%MatrixMarket matrix array integer general\n1 2\n3\n4\n"
        np.testing.assert_array_equal(parse_matrix_market(text), [[3, 4]])

    def test_bad_header(self):
        with pytest.raises(ParseError) as info:
            parse_matrix_market("hello\n1 1\n1\n")
        assert info.value.line == 1

    def test_dimension_mismatch(self):
        with pytest.raises(ParseError) as info:
            parse_matrix_market("%%MatrixMarket matrix array real general\n2 2\n1\n2\n3\n")
        assert info.value.line == 5
        with pytest.raises(ParseError) as info:
            parse_matrix_market("%%MatrixMarket matrix array real general\n1 1\n1\n2\n")
        assert info.value.line == 4

    def test_out_of_range_index(self):
        with pytest.raises(ParseError) as info:
            parse_matrix_market("%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1.0\n")
        assert info.value.line == 3

    def test_bad_value(self):
        with pytest.raises(ParseError) as info:
            parse_matrix_market("%%MatrixMarket matrix coordinate real general\n2 2 1\n1 1 abc\n")
        assert info.value.line == 3

    @pytest.mark.parametrize(
        "text",
        [
            "%%MatrixMarket matrix coordinate real symmetric\n4 4 4\n1 1 1.5\n3 1 -2\n4 2 3.25\n4 4 7\n",
            "%%MatrixMarket matrix array real general\n2 3\n1\n2\n3\n4\n5\n6\n",
            "%%MatrixMarket matrix coordinate real skew-symmetric\n3 3 2\n2 1 4\n3 2 -1\n",
            "%%MatrixMarket matrix coordinate integer general\n3 2 3\n1 1 4\n3 2 -1\n2 2 9\n",
        ],
    )
    def test_agrees_with_scipy(self, text):
        ref = scipy.io.mmread(io.BytesIO(text.encode()))
        ref = ref.toarray() if hasattr(ref, "toarray") else np.asarray(ref)
        np.testing.assert_array_equal(parse_matrix_market(text), ref)


class TestRoundTrip:
    @pytest.mark.parametrize("fmt,ext", [("csv", ".csv"), ("matrix-market", ".mtx")])
    def test_file_round_trip(self, tmp_path, rng, fmt, ext):
        A = rng.standard_normal((7, 4)) * 10.0 ** rng.integers(-8, 8, (7, 4))
        path = tmp_path / f"a{ext}"
        save_matrix(path, A)
        assert infer_format(path) == fmt
        B = load_matrix(path)
        assert np.max(np.abs(A - B)) <= 1e-12
        np.testing.assert_array_equal(A, B)

    @settings(max_examples=50, deadline=None)
    @given(
        arrays(
            np.float64,
            st.tuples(st.integers(1, 5), st.integers(1, 5)),
            elements=st.floats(allow_nan=False, allow_infinity=False, width=64),
        ),
        st.sampled_from(["csv", "matrix-market"]),
    )
    def test_exact_text_round_trip(self, A, fmt):
        text = format_matrix(A, fmt)
        B = parse_csv(text) if fmt == "csv" else parse_matrix_market(text)
        np.testing.assert_array_equal(A, B)

    def test_unknown_format(self, tmp_path):
        with pytest.raises(InvalidArgumentError):
            load_matrix(tmp_path / "x.csv", "xml")
        with pytest.raises(InvalidArgumentError):
            format_matrix(np.eye(2), "xml")
