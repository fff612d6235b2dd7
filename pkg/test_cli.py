import csv
import io
import json
from functools import partial

from eklimit.cli import CliConfig, build_parser, main, resolve_config, run_checks
from eklimit.eklerch import EKQuery, direct_sum, kstar_regularized_at_1
from eklimit.lattice import gaussian_lattice, new_lattice
from eklimit.verify import verify_distribution, verify_second_limit


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


def test_eval_kstar_prints_result_json():
    code, text = run("eval", "kstar", "--a", "0", "--z0", "0,0", "--w0", "0,0", "--s", "3,0",
                     "--lattice", "1,0,0,1")
    assert code == 0
    record = json.loads(text)
    value = complex(*record["value"])
    oracle = direct_sum(EKQuery(0, 0, 0, 3, gaussian_lattice()), 200.0)
    assert abs(value - oracle) < 1e-9
    assert record["is_pole"] is False


def test_eval_kstar_without_s_is_a_usage_error(capsys):
    code, text = run("eval", "kstar", "--a", "0")
    assert code == 2
    assert text == ""
    assert "usage" in capsys.readouterr().err


def test_eval_kstar_at_the_pole_exits_3(capsys):
    code, _ = run("eval", "kstar", "--s", "1,0")
    assert code == 3
    assert "kstar_regularized" in capsys.readouterr().err


def test_eval_wp_at_lattice_point_is_a_domain_error():
    code, _ = run("eval", "wp", "--z", "1,0")
    assert code == 3


def test_eval_theta_round_trips_numbers():
    code, text = run("eval", "theta", "--z", "0.25,0.4", "--lattice", "1,0,0.3,1.2")
    assert code == 0
    record = json.loads(text)
    assert record["z"] == [0.25, 0.4]
    assert record["lattice"] == [1.0, 0.0, 0.3, 1.2]


def test_eval_log_theta_hat_dump():
    code, text = run("eval", "log-theta-hat", "--g2", "4", "--g3", "0", "--p", "5", "--N", "6",
                     "--M", "8")
    assert code == 0
    lines = text.strip().splitlines()
    assert lines[0] == "model g2=4 g3=0 p=5 N=6 M=8"
    assert lines[-1] == "# + log_p(t)"


def test_bad_lattice_is_a_usage_error():
    assert run("eval", "theta", "--z", "0.1,0.1", "--lattice", "1,0,2,0")[0] == 2
    assert run("eval", "theta", "--z", "0.1", "--lattice", "1,0,0")[0] == 2


def test_verify_second_limit_single_report():
    code, text = run("verify", "second-limit", "--lattice", "1,0,0,1", "--z", "0.25,0.4")
    assert code == 0
    reports = json.loads(text)
    assert len(reports) == 1
    assert reports[0]["check"] == "second-limit" and reports[0]["pass"] is True


def test_verify_padic_dist_and_negative_control():
    args = ["verify", "padic-dist", "--g2", "4", "--g3", "0", "--p", "5", "--N", "8", "--M", "16"]
    code, text = run(*args)
    assert code == 0
    assert json.loads(text)[0]["pass"] is True
    code, text = run(*args, "--perturb", "5")
    assert code == 1
    assert json.loads(text)[0]["pass"] is False


def test_verify_padic_dist_irrational_model_is_a_domain_error():
    code, _ = run("verify", "padic-dist", "--g2", "0", "--g3", "1", "--p", "7", "--N", "4", "--M", "8")
    assert code == 3


def test_verify_table_output():
    code, text = run("verify", "prop-c", "--output", "table")
    assert code == 0
    rows = [line.split("\t") for line in text.strip().splitlines()]
    assert [r[0] for r in rows] == ["prop-c", "delta-consistency"]
    assert all(r[1] == "pass" for r in rows)


def test_table_rows_and_consistency_with_eval():
    code, text = run("table", "--start", "1.1", "--stop", "3.0", "--step", "0.1")
    assert code == 0
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == ["s", "re", "im", "regularized"]
    assert len(rows) == 21
    last = rows[-1]
    assert float(last[0]) == 3.0
    _, evaluated = run("eval", "kstar", "--s", "3,0")
    assert float(last[1]) == json.loads(evaluated)["value"][0]


def test_table_marks_the_pole():
    code, text = run("table", "--start", "0.8", "--stop", "1.2", "--step", "0.1")
    assert code == 0
    rows = list(csv.reader(io.StringIO(text)))[1:]
    pole = [r for r in rows if float(r[0]) == 1.0]
    assert len(pole) == 1
    assert pole[0][1] == "pole" and pole[0][2] == "pole"
    assert abs(float(pole[0][3]) - kstar_regularized_at_1(gaussian_lattice()).real) < 1e-10
    assert all(r[3] != "" for r in rows)


def test_config_file_then_flags(tmp_path):
    path = tmp_path / "ek.cfg"
    path.write_text("# defaults for the oblique lattice\nlattice = 1,0,0.3,1.2\nseed = 0x10\n"
                    "output = table\n")
    args = build_parser().parse_args(["verify", "prop-c", "--config", str(path), "--seed", "5"])
    config = resolve_config(args)
    assert config.lattice == new_lattice(1, 0.3 + 1.2j)
    assert config.seed == 5
    assert config.output == "table"
    defaults = resolve_config(build_parser().parse_args(["verify", "prop-c"]))
    assert defaults == CliConfig()


def test_config_file_errors(tmp_path):
    path = tmp_path / "bad.cfg"
    path.write_text("colour = blue\n")
    assert run("verify", "prop-c", "--config", str(path))[0] == 2
    assert run("verify", "prop-c", "--config", str(tmp_path / "missing.cfg"))[0] == 2
    assert run("verify", "prop-c", "--quad-tol", "0.5")[0] == 2


def test_parallel_run_keeps_declaration_order():
    L = gaussian_lattice()
    checks = [partial(verify_second_limit, z, L) for z in (0.25 + 0.4j, 0.1 + 0.7j, 0.6 + 0.2j)]
    checks.append(partial(verify_distribution, 2, L))
    sequential = run_checks(checks, jobs=1, progress=False)
    parallel = run_checks(checks, jobs=2, progress=False)
    assert [r.to_json(include_runtime=False) for r in sequential] == \
        [r.to_json(include_runtime=False) for r in parallel]


REPORT_KEYS = ["check", "lattice", "params", "lhs", "rhs", "abs_error", "tolerance", "pass",
               "runtime_ms"]


def passing_reports(text):
    reports = json.loads(text)
    assert reports
    for r in reports:
        assert list(r) == REPORT_KEYS
        assert r["pass"] is True, r
    return reports


def test_out_of_range_counts_are_usage_errors(capsys):
    assert run("verify", "distribution", "--n", "1")[0] == 2
    assert run("verify", "distribution", "--n", "2", "0")[0] == 2
    assert run("verify", "second-limit", "--count", "-1")[0] == 2
    assert run("verify", "kronecker", "--count", "0")[0] == 2
    assert run("verify", "all", "--jobs", "0")[0] == 2
    assert run("eval", "log-theta-hat", "--g2", "4", "--g3", "0", "--p", "5", "--N", "0",
               "--M", "8")[0] == 2
    assert "Traceback" not in capsys.readouterr().err


def test_symmetric_model_rejects_nonzero_e_star():
    code, _ = run("eval", "log-theta-hat", "--g2", "4", "--g3", "0", "--p", "5", "--N", "6",
                  "--M", "8", "--e-star", "1/3")
    assert code == 3


def test_verify_distribution_subcommand():
    code, text = run("verify", "distribution", "--n", "2", "3")
    assert code == 0
    reports = passing_reports(text)
    assert [(r["check"], r["params"]["n"]) for r in reports] == [("distribution", 2),
                                                                 ("distribution", 3)]


def test_verify_kronecker_subcommand():
    code, text = run("verify", "kronecker", "--lattice", "1,0,0.3,1.2")
    assert code == 0
    reports = passing_reports(text)
    assert len(reports) == 20
    assert {r["check"] for r in reports} == {"kronecker"}
    assert all(r["lattice"] == [1.0, 0.0, 0.3, 1.2] for r in reports)


def test_verify_theta_dist_2_subcommand():
    code, text = run("verify", "theta-dist-2", "--count", "3")
    assert code == 0
    reports = passing_reports(text)
    assert [r["check"] for r in reports][-1] == "theta-constant-term"
    assert len(reports) == 4


def test_verify_all_on_the_oblique_lattice():
    code, text = run("verify", "all", "--lattice", "1,0,0.3,1.2", "--count", "3")
    assert code == 0
    reports = passing_reports(text)
    names = [r["check"] for r in reports]
    assert names[0] == "first-limit"
    assert names[-2:] == ["padic-dist", "padic-dist"]
    assert reports[-1]["lattice"] is None
    assert [r["params"]["p"] for r in reports[-2:]] == [5, 7]
