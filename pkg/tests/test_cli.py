import json

import numpy as np
import pytest

import dantzig_adm.cli as cli
from dantzig_adm import fileio
from dantzig_adm.adm import RunReport


def _gen_args(out, n=30, p=90, s=4, sigma=0.05, design="unit", seed=1, extra=()):
    return [
        "gen",
        "--n", str(n),
        "--p", str(p),
        "--s", str(s),
        "--sigma", str(sigma),
        "--design", design,
        "--seed", str(seed),
        "--out", str(out),
        *extra,
    ]


class TestGen:
    def test_writes_reloadable_files(self, tmp_path):
        out = tmp_path / "inst"
        assert cli.main(_gen_args(out)) == 0
        X = fileio.read_matrix(out / "X.mtx")
        y = fileio.read_vector(out / "y.mtx")
        beta_true = fileio.read_vector(out / "beta_true.mtx")
        manifest = fileio.read_manifest(out / "manifest.txt")
        assert X.shape == (30, 90)
        assert y.shape == (30,)
        assert beta_true.shape == (90,)
        assert int(manifest["n"]) == 30
        assert float(manifest["delta"]) > 0
        # files round-trip bit-exactly against a regeneration in memory
        from dantzig_adm.datagen import GenSpec, make_instance

        inst, truth = make_instance(
            GenSpec(n=30, p=90, s=4, sigma_noise=0.05, design_kind="unit_columns", seed=1)
        )
        assert np.array_equal(X, inst.X)
        assert np.array_equal(y, inst.y)
        assert np.array_equal(beta_true, truth.beta_true)

    def test_orthogonal_design_row_identity(self, tmp_path):
        out = tmp_path / "ortho"
        assert cli.main(_gen_args(out, design="ortho")) == 0
        X = fileio.read_matrix(out / "X.mtx")
        assert np.abs(X @ X.T - np.eye(30)).max() <= 1e-10

    def test_same_flags_produce_identical_files(self, tmp_path):
        out1, out2 = tmp_path / "a", tmp_path / "b"
        assert cli.main(_gen_args(out1)) == 0
        assert cli.main(_gen_args(out2)) == 0
        for name in ("X.mtx", "y.mtx", "beta_true.mtx", "manifest.txt"):
            assert (out1 / name).read_bytes() == (out2 / name).read_bytes()

    def test_sigma_zero_without_delta_is_usage_error(self, tmp_path):
        assert cli.main(_gen_args(tmp_path / "z", sigma=0.0)) == 1

    def test_sigma_zero_with_delta_ok(self, tmp_path):
        out = tmp_path / "z"
        assert cli.main(_gen_args(out, sigma=0.0, extra=("--delta", "0.5"))) == 0
        manifest = fileio.read_manifest(out / "manifest.txt")
        assert float(manifest["delta"]) == 0.5


class TestSolve:
    def test_solves_and_writes_outputs(self, tmp_path):
        out = tmp_path / "inst"
        assert cli.main(_gen_args(out)) == 0
        assert cli.main(["solve", str(out)]) == 0
        beta_tilde = fileio.read_vector(out / "beta_tilde.mtx")
        lam = fileio.read_vector(out / "lambda.mtx")
        assert beta_tilde.shape == (90,)
        assert lam.shape == (90,)
        report = json.loads((out / "report.json").read_text())
        assert report["status"] == "converged"
        assert report["outer_iterations"] >= 1
        assert (out / "beta_hat.mtx").exists()
        evaluation = json.loads((out / "eval.json").read_text())
        assert evaluation["rho2"] <= evaluation["rho2_orig"]
        run_manifest = fileio.read_manifest(out / "run_manifest.txt")
        assert run_manifest["status"] == "converged"

    def test_zero_response_instance(self, tmp_path):
        out = tmp_path / "zero"
        assert cli.main(_gen_args(out, s=0, sigma=0.0, extra=("--delta", "0.5"))) == 0
        assert cli.main(["solve", str(out), "--tol", "1e-3"]) == 0
        beta_tilde = fileio.read_vector(out / "beta_tilde.mtx")
        assert np.abs(beta_tilde).sum() <= 1e-3

    def test_missing_instance_dir_is_io_error(self, tmp_path):
        assert cli.main(["solve", str(tmp_path / "missing")]) == 2

    def test_numerical_failure_exit_code(self, tmp_path, monkeypatch):
        out = tmp_path / "inst"
        assert cli.main(_gen_args(out)) == 0

        def failing(inst, config, beta0=None, lambda0=None, callback=None):
            p = inst.p
            report = RunReport(
                outer_iterations=1,
                inner_iteration_total=1,
                stopping_metric_history=[1.0],
                dual_objective_history=[0.0],
                wall_time=0.0,
                status="numerical_failure",
            )
            return np.zeros(p), np.zeros(p), report

        monkeypatch.setattr(cli.adm, "solve", failing)
        assert cli.main(["solve", str(out)]) == 3


class TestBench:
    def test_deterministic_csv_with_fixed_seed(self, tmp_path):
        args = [
            "bench",
            "--design", "unit",
            "--sigma", "0.05",
            "--size", "30,90,4",
            "--reps", "2",
            "--seed", "5",
        ]
        out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
        assert cli.main(args + ["--out", str(out1)]) == 0
        assert cli.main(args + ["--out", str(out2)]) == 0
        rows1 = out1.read_text().splitlines()
        rows2 = out2.read_text().splitlines()
        assert rows1[0] == cli.BENCH_HEADER
        cpu_col = cli.BENCH_HEADER.split(",").index("cpu_mean_s")

        def drop_cpu(line):
            parts = line.split(",")
            return parts[:cpu_col] + parts[cpu_col + 1 :]

        assert [drop_cpu(r) for r in rows1] == [drop_cpu(r) for r in rows2]

    def test_row_contents(self, tmp_path):
        out = tmp_path / "bench.csv"
        assert (
            cli.main(
                [
                    "bench",
                    "--design", "unit",
                    "--sigma", "0.05",
                    "--size", "30,90,4",
                    "--reps", "2",
                    "--out", str(out),
                ]
            )
            == 0
        )
        header, row = out.read_text().splitlines()
        fields = dict(zip(header.split(","), row.split(",")))
        assert fields["design"] == "unit_columns"
        assert fields["n"] == "30" and fields["p"] == "90" and fields["s"] == "4"
        assert fields["instances"] == "2"
        assert fields["failures"] == "0"
        assert float(fields["rho2_mean"]) <= float(fields["rho2_orig_mean"])

    def test_parallel_workers_match_serial_rows(self, tmp_path):
        base = [
            "bench",
            "--design", "unit",
            "--sigma", "0.05",
            "--size", "30,90,4",
            "--reps", "3",
            "--seed", "2",
        ]
        serial, parallel = tmp_path / "serial.csv", tmp_path / "parallel.csv"
        assert cli.main(base + ["--out", str(serial)]) == 0
        assert cli.main(base + ["--workers", "3", "--out", str(parallel)]) == 0
        cpu_col = cli.BENCH_HEADER.split(",").index("cpu_mean_s")

        def drop_cpu(text):
            return [
                line.split(",")[:cpu_col] + line.split(",")[cpu_col + 1 :]
                for line in text.splitlines()
            ]

        assert drop_cpu(serial.read_text()) == drop_cpu(parallel.read_text())

    def test_worker_env_cap(self, tmp_path, monkeypatch):
        monkeypatch.setenv(cli.WORKERS_ENV, "1")
        assert cli._resolve_workers(8, 10) == 1
        monkeypatch.delenv(cli.WORKERS_ENV)
        assert cli._resolve_workers(8, 10) == 8
        assert cli._resolve_workers(8, 3) == 3

    def test_needs_size_or_grid(self, tmp_path):
        assert cli.main(["bench", "--sigma", "0.05"]) == 1


class TestFigureData:
    def test_scatter_export(self, tmp_path):
        out = tmp_path / "inst"
        assert cli.main(_gen_args(out)) == 0
        assert cli.main(["solve", str(out)]) == 0
        csv_path = tmp_path / "figure.csv"
        assert cli.main(["figure-data", str(out), "--out", str(csv_path)]) == 0
        lines = csv_path.read_text().splitlines()
        assert lines[0] == "index,beta_true,beta_tilde,beta_hat"
        assert 1 < len(lines) <= 91
        beta_true = fileio.read_vector(out / "beta_true.mtx")
        covered = {int(line.split(",")[0]) for line in lines[1:]}
        assert set(np.flatnonzero(beta_true).tolist()) <= covered
        for line in lines[1:]:
            index, *values = line.split(",")
            assert 0 <= int(index) < 90
            assert float(values[0]) == beta_true[int(index)]

    def test_estimate_only_columns_without_ground_truth(self, tmp_path):
        out = tmp_path / "inst"
        assert cli.main(_gen_args(out)) == 0
        assert cli.main(["solve", str(out)]) == 0
        (out / "beta_true.mtx").unlink()
        csv_path = tmp_path / "figure.csv"
        assert cli.main(["figure-data", str(out), "--out", str(csv_path)]) == 0
        assert csv_path.read_text().splitlines()[0] == "index,beta_tilde,beta_hat"

    def test_missing_solution_is_io_error(self, tmp_path):
        assert cli.main(["figure-data", str(tmp_path)]) == 2


class TestExitCodes:
    def test_unknown_flag_is_usage_error(self):
        assert cli.main(["gen", "--bogus"]) == 1

    def test_no_command_is_usage_error(self, capsys):
        assert cli.main([]) == 1

    def test_help_exits_zero(self):
        assert cli.main(["--help"]) == 0
        assert cli.main(["gen", "--help"]) == 0
