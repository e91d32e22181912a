import json

import pytest

from infinikit.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def diag4(tmp_path):
    p = tmp_path / "diag4.txt"
    p.write_text("1 0 0 0\n0 0.5 0 0\n0 0 0.3333333333333333 0\n0 0 0 0.25\n")
    return str(p)


class TestExitCodes:
    def test_st_finite(self, capsys):
        code, out, err = run(capsys, "st", "3 + eps")
        assert (code, out.strip(), err) == (0, "3", "")

    def test_st_infinite_is_domain_error(self, capsys):
        code, out, err = run(capsys, "st", "1/eps")
        assert code == 1
        assert err.startswith("error[infinite-input]:")
        assert err.count("\n") == 1

    def test_syntax_error_is_usage_class(self, capsys):
        code, _, err = run(capsys, "eval", "1 + * 2")
        assert code == 2
        assert err.startswith("error[syntax]:")

    def test_unknown_flag(self, capsys):
        code, _, err = run(capsys, "st", "--bogus", "1")
        assert code == 2
        assert err.startswith("error[usage]:")

    def test_missing_file(self, capsys):
        code, _, err = run(capsys, "spectrum", "--matrix", "/nonexistent/m.txt")
        assert code == 1
        assert err.startswith("error[empty-input]:")


class TestSubcommands:
    def test_eval_lc_canonical(self, capsys):
        code, out, _ = run(capsys, "eval", "1/2 + eps")
        assert code == 0
        assert out.strip() == "1/2 + 1*eps^1"

    def test_eval_seq_mode(self, capsys):
        code, out, _ = run(capsys, "eval", "3*n^-1*ln(n)^2", "--mode", "seq")
        assert out.strip() == "3*n^-1*ln(n)^2"

    def test_classify(self, capsys):
        _, out, _ = run(capsys, "classify", "eps*eps")
        assert out.strip() == "infinitesimal"

    def test_diff_exact(self, capsys):
        code, out, _ = run(capsys, "diff", "--f", "x^3 - 2*x", "--x0", "1")
        assert (code, out.strip()) == (0, "1")

    def test_diff_rational_point(self, capsys):
        _, out, _ = run(capsys, "diff", "--f", "x^2", "--x0=-1/2")
        assert out.strip() == "-1"

    def test_seq_with_prefix_file(self, capsys, tmp_path):
        p = tmp_path / "prefix.txt"
        p.write_text("{1:0.5, 2:0.25}")
        code, out, _ = run(capsys, "seq", "--expr", "n^-1", "--prefix", str(p))
        assert code == 0
        assert "rate: 1*n^-1" in out
        assert "limit: 0" in out

    def test_compare_undecidable(self, capsys):
        _, out, _ = run(
            capsys, "compare", "--a", "(2 + (-1)^n)*n^-1", "--b", "2*n^-1"
        )
        assert out.strip() == "undecidable-without-ultrafilter"

    def test_compare_decided(self, capsys):
        _, out, _ = run(capsys, "compare", "--a", "n^-2", "--b", "n^-1")
        assert out.strip() == "less"

    def test_spectrum(self, capsys, diag4):
        code, out, _ = run(capsys, "spectrum", "--matrix", diag4)
        assert code == 0
        assert out.splitlines()[0] == "1"
        assert out.splitlines()[3] == "0.25"

    def test_spectrum_with_tail(self, capsys, diag4):
        _, out, _ = run(capsys, "spectrum", "--matrix", diag4, "--tail", "n^-1")
        assert out.splitlines()[-1] == "tail: 1*n^-1"

    def test_dixmier_table(self, capsys):
        code, out, _ = run(capsys, "dixmier", "--tail", "n^-1", "--cap", "2^18")
        assert code == 0
        lines = out.splitlines()
        assert lines[0].startswith("N=16 gamma=")
        assert "measurable: yes" in lines
        value_line = next(l for l in lines if l.startswith("value:"))
        assert abs(float(value_line.split()[1]) - 1.0) < 0.05

    def test_dixmier_points_file(self, capsys, tmp_path):
        p = tmp_path / "points.txt"
        code, _, _ = run(
            capsys, "dixmier", "--tail", "n^-1", "--cap", "2^14",
            "--points", str(p),
        )
        assert code == 0
        rows = p.read_text().splitlines()
        assert rows[0].startswith("16 ")
        assert len(rows) == 11

    def test_bridge_trace(self, capsys, diag4):
        code, out, _ = run(
            capsys, "bridge", "--matrix", diag4, "--tail", "n^-1",
            "--predicates", "m>10,evens",
        )
        assert code == 0
        assert "query m>10: in_filter" in out
        assert "query evens: undecided" in out
        assert "enclosure: [1/2, 1] (decided_bits=1)" in out
        assert "note: canonical stages" in out

    def test_bridge_braced_predicates(self, capsys, diag4):
        code, out, _ = run(
            capsys, "bridge", "--matrix", diag4, "--tail", "n^-1",
            "--predicates", "finite:{2,3},cofinite:{5}",
        )
        assert code == 0
        assert "query finite:{2,3}: in_complement" in out
        assert "query cofinite:{5}: in_filter" in out


class TestDocFormat:
    def test_st_doc(self, capsys):
        _, out, _ = run(capsys, "st", "3 + eps", "--format", "doc")
        assert json.loads(out) == {"st": "3"}

    def test_dixmier_doc_keys(self, capsys):
        _, out, _ = run(
            capsys, "dixmier", "--tail", "n^-1", "--cap", "2^14",
            "--format", "doc",
        )
        doc = json.loads(out)
        assert set(doc) == {
            "schedule", "gamma_values", "liminf", "limsup",
            "spread", "measurable", "value",
        }

    def test_bridge_doc(self, capsys, diag4):
        _, out, _ = run(
            capsys, "bridge", "--matrix", diag4, "--tail", "n^-2",
            "--predicates", "squares", "--format", "doc",
        )
        doc = json.loads(out)
        assert doc["queries"] == [["squares", "in_filter"]]
        assert doc["enclosure"] == {"lo": "1/2", "hi": "1", "decided_bits": 1}


class TestSeeding:
    def test_seeded_runs_agree(self, capsys, diag4):
        argv = [
            "bridge", "--matrix", diag4, "--tail", "n^-1",
            "--predicates", "m>10", "--seed", "5",
        ]
        a = run(capsys, *argv)
        b = run(capsys, *argv)
        assert a == b

    def test_env_seed_fallback(self, capsys, diag4, monkeypatch):
        argv = [
            "bridge", "--matrix", diag4, "--tail", "n^-1", "--predicates", "m>10",
        ]
        explicit = run(capsys, *(argv + ["--seed", "5"]))
        monkeypatch.setenv("INFINIKIT_SEED", "5")
        from_env = run(capsys, *argv)
        assert explicit == from_env

    def test_bad_env_seed(self, capsys, diag4, monkeypatch):
        monkeypatch.setenv("INFINIKIT_SEED", "abc")
        code, _, err = run(
            capsys, "bridge", "--matrix", diag4, "--tail", "n^-1",
            "--predicates", "m>10",
        )
        assert code == 2
        assert err.startswith("error[usage]:")
