import csv
import io
import json

import jsonschema
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from graph_concordance import (
    AlignmentError,
    ClosedNeighborhoodError,
    ParseError,
    SelfLoopError,
    emit_report,
    load_dataset,
    permutation_inference,
)
from graph_concordance.dataio import (
    RESULT_CSV_COLUMNS,
    load_graph,
    load_schema,
    read_edge_list,
    result_to_dict,
    write_edge_list,
    write_outcomes,
)
from graph_concordance.random_graphs import erdos_renyi


def _write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return p


@pytest.fixture
def matching_files(tmp_path):
    g = _write(tmp_path, "g.txt", "# matching\n1 2\n\n3,4\n")
    y = _write(tmp_path, "y.csv", "node_label,value\n1,1\n2,1\n3,-1\n4,-1\n")
    return g, y


class TestParsing:
    def test_edge_list_formats(self, tmp_path):
        p = _write(tmp_path, "e.txt", "a b\n# note\nb,c\n  c\t d  \n\n")
        assert read_edge_list(p) == [("a", "b"), ("b", "c"), ("c", "d")]

    def test_bad_line_reports_number(self, tmp_path):
        p = _write(tmp_path, "e.txt", "a b\nb c\nc d e\n")
        with pytest.raises(ParseError) as exc:
            read_edge_list(p)
        assert exc.value.line == 3
        assert ":3" in str(exc.value)

    def test_self_loop(self, tmp_path):
        with pytest.raises(SelfLoopError):
            load_graph(_write(tmp_path, "e.txt", "a b\nc c\n"))

    def test_vertex_list_adds_isolated(self, tmp_path):
        e = _write(tmp_path, "e.txt", "a b\nb c\nc d\n")
        v = _write(tmp_path, "v.txt", "a\nb\nc\nd\nz\n")
        g = load_graph(e, v)
        assert g.n == 5 and g.degree.tolist()[-1] == 0

    def test_graph_errors_pass_through(self, tmp_path):
        with pytest.raises(ClosedNeighborhoodError):
            load_graph(_write(tmp_path, "e.txt", "a b\nb c\n"))

    def test_unmatched_outcome_label(self, tmp_path):
        e = _write(tmp_path, "e.txt", "a b\nb c\nc d\n")
        y = _write(tmp_path, "y.csv", "node_label,value\na,1\nb,2\nc,3\nzz,4\n")
        with pytest.raises(AlignmentError) as exc:
            load_dataset(e, y)
        assert "zz" in str(exc.value)
        assert exc.value.labels == ["zz"]

    def test_missing_outcome_row(self, tmp_path):
        e = _write(tmp_path, "e.txt", "a b\nb c\nc d\n")
        y = _write(tmp_path, "y.csv", "node_label,value\na,1\nb,2\nc,3\n")
        with pytest.raises(AlignmentError, match="'d'|d"):
            load_dataset(e, y)

    @pytest.mark.parametrize(
        "body, line",
        [
            ("node_label,value\na,1\nb,x\n", 3),
            ("node_label,value\na,1\nb,2,3\n", 3),
            ("node_label,value\na,1\na,2\n", 3),
            ("node_label,value\na,nan\nb,1\n", 2),
        ],
    )
    def test_outcome_parse_errors(self, tmp_path, body, line):
        e = _write(tmp_path, "e.txt", "a b\nc d\n")
        y = _write(tmp_path, "y.csv", body + "c,1\nd,1\n")
        with pytest.raises(ParseError) as exc:
            load_dataset(e, y)
        assert exc.value.line == line

    def test_dataset_alignment(self, tmp_path, matching_files):
        g, y = matching_files
        y2 = _write(tmp_path, "y2.csv", "node_label,value\n4,-1\n2,1\n3,-1\n1,1\n")
        a, b = load_dataset(g, y), load_dataset(g, y2)
        assert np.array_equal(a.outcomes, b.outcomes)
        assert a.label_map == {"1": 0, "2": 1, "3": 2, "4": 3}

    def test_types(self, tmp_path, matching_files):
        g, _ = matching_files
        t = _write(tmp_path, "t.csv", "node_label,type_label\n1,t\n2,t\n3,s\n4,s\n")
        assert load_dataset(g, types_path=t).types == ["t", "t", "s", "s"]

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 10_000))
    def test_roundtrip_files(self, tmp_path_factory, seed):
        d = tmp_path_factory.mktemp("rt")
        g = erdos_renyi(40, 2.0, seed)
        y = np.random.default_rng(seed).standard_normal(40) * 1e3
        write_edge_list(g, d / "e.txt", d / "v.txt")
        write_outcomes(g, y, d / "y.csv")
        ds = load_dataset(d / "e.txt", d / "y.csv", d / "v.txt")
        assert ds.graph == g
        assert np.array_equal(ds.outcomes, y)


class TestReports:
    @pytest.fixture
    def result(self):
        g = erdos_renyi(50, 2.0, 1)
        y = np.random.default_rng(2).standard_normal(50)
        return permutation_inference(g, y, permutations=99, seed=3)

    def test_byte_stable(self, result, tmp_path):
        a = emit_report(result, "json", tmp_path / "a.json")
        b = emit_report(result, "json", tmp_path / "b.json")
        assert a == b
        assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()
        assert emit_report(result, "csv") == emit_report(result, "csv")

    def test_csv_columns(self, result):
        text = emit_report(result, "csv")
        header = next(csv.reader(io.StringIO(text)))
        assert tuple(header[:7]) == RESULT_CSV_COLUMNS
        rows = list(csv.DictReader(io.StringIO(text)))
        assert len(rows) == 1
        assert float(rows[0]["c_hat"]) == result.c_hat
        assert int(rows[0]["B"]) == 99
        assert json.loads(rows[0]["seed"]) == [3]

    def test_json_roundtrip_exact(self, result):
        d = json.loads(emit_report(result, "json"))
        for f in ("c_hat", "ci_lower", "ci_upper", "p_value", "sigma_plus", "t_obs", "critical_value"):
            assert d[f] == getattr(result, f)
        assert d["B"] == result.n_permutations

    def test_json_schema(self, result):
        jsonschema.validate(json.loads(emit_report(result, "json")), load_schema("inference_result"))

    def test_nan_becomes_null(self):
        d = result_to_dict({"x": float("nan"), "y": np.float64(1.5), "z": np.int64(3)})
        assert d == {"x": None, "y": 1.5, "z": 3}

    def test_bad_format(self, result):
        with pytest.raises(ValueError):
            emit_report(result, "xml")
