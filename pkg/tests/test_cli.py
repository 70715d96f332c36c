import hashlib
from pathlib import Path

import numpy as np
import pytest

import topobehavior as tb
from topobehavior.cli import main
from topobehavior.pipeline import PipelineConfig, run_pipeline


def tree_digest(root: Path) -> dict[str, str]:
    return {
        str(p.relative_to(root)): hashlib.sha256(p.read_bytes()).hexdigest()
        for p in sorted(root.rglob("*"))
        if p.is_file()
    }


FAST_SETS = [
    "--set", "patch_length=60", "--set", "overlap=30",
    "--set", "window_length=8", "--set", "grid_size=30",
    "--set", "n_depths=3", "--set", "cv_folds=3",
    "--set", "cv_repeats=2", "--set", "svr_folds=3",
    "--set", "svr_repeats=2", "--set", "n_perms=99",
]
FAST_KW = dict(
    patch_length=60, overlap=30, window_length=8, grid_size=30, n_depths=3,
    cv_folds=3, cv_repeats=2, svr_folds=3, svr_repeats=2, n_perms=99,
)


@pytest.fixture(scope="module")
def synth_dirs(tmp_path_factory):
    base = tmp_path_factory.mktemp("synthcli")
    for cid in (1, 4):
        rc = main([
            "synth", "--kind", "posture_class",
            "--param", f"class_id={cid}", "--param", "n_samples=3",
            "--param", "n_frames=120", "--param", "dim=6",
            "--seed", "9", "--out", str(base / f"c{cid}"),
        ])
        assert rc == 0
    return base


@pytest.fixture(scope="module")
def cli_pipe(synth_dirs, tmp_path_factory):
    out = tmp_path_factory.mktemp("clipipe") / "run"
    inputs = sorted(str(p) for p in synth_dirs.rglob("class*.csv"))
    rc = main(["pipeline", *FAST_SETS, "--seed", "5", "--out", str(out), *inputs])
    assert rc == 0
    return out


class TestSynthCommand:
    def test_writes_samples_and_index(self, synth_dirs):
        files = sorted((synth_dirs / "c1").glob("*.csv"))
        names = [f.name for f in files]
        assert "index.csv" in names
        assert sum(n.startswith("class1") for n in names) == 3
        index = (synth_dirs / "c1" / "index.csv").read_text().splitlines()
        assert index[0] == "class1-s00.csv,class1"

    def test_sidecar_carries_label(self, synth_dirs):
        meta = (synth_dirs / "c1" / "class1-s00.meta").read_text()
        assert "label=class1" in meta

    def test_single_series_kinds(self, tmp_path):
        rc = main(["synth", "--kind", "sine", "--param", "n=40",
                   "--param", "period=8", "--out", str(tmp_path / "s")])
        assert rc == 0
        ts = tb.load_postures(next((tmp_path / "s").glob("sine*.csv")))
        assert len(ts) == 40

    def test_bad_generator_params_exit_2(self, tmp_path, capsys):
        rc = main(["synth", "--kind", "sine", "--param", "wavelength=8",
                   "--out", str(tmp_path / "s")])
        assert rc == 2
        assert "error:" in capsys.readouterr().err


class TestStageRoundTrip:
    """Stage commands re-run on pipeline intermediates reproduce them."""

    def test_embed_ph_landscape_reproduce_pipeline_files(self, cli_pipe, tmp_path):
        pdir = cli_pipe / "samples" / "class1-s00" / "patch00"
        grid_line = [
            l for l in (cli_pipe / "summary.txt").read_text().splitlines()
            if l.startswith("grid=")
        ][0]
        t_max = grid_line.split(",")[1].split("]")[0]

        rc = main(["embed", "--input", str(pdir / "frames.csv"),
                   "--window-length", "8", "--out", str(tmp_path / "cloud.csv")])
        assert rc == 0
        assert (tmp_path / "cloud.csv").read_bytes() == (pdir / "cloud.csv").read_bytes()

        rc = main(["ph", "--input", str(tmp_path / "cloud.csv"),
                   "--out", str(tmp_path / "diagram.csv")])
        assert rc == 0
        assert (tmp_path / "diagram.csv").read_bytes() == (pdir / "diagram.csv").read_bytes()

        rc = main(["landscape", "--input", str(tmp_path / "diagram.csv"),
                   "--t-max", t_max, "--grid-size", "30", "--depths", "3",
                   "--out", str(tmp_path / "landscape.csv")])
        assert rc == 0
        assert (
            (tmp_path / "landscape.csv").read_bytes()
            == (pdir / "landscape.csv").read_bytes()
        )

    def test_cli_pipeline_matches_api_run(self, cli_pipe, synth_dirs, tmp_path):
        inputs = [tb.load_postures(p) for p in sorted(synth_dirs.rglob("class*.csv"))]
        api_out = tmp_path / "api"
        run_pipeline(PipelineConfig(seed=5, **FAST_KW), inputs, api_out)
        assert tree_digest(api_out) == tree_digest(cli_pipe)

    def test_emitted_config_file_reproduces_run(self, cli_pipe, synth_dirs, tmp_path):
        inputs = sorted(str(p) for p in synth_dirs.rglob("class*.csv"))
        out = tmp_path / "fromcfg"
        rc = main(["pipeline", "--config", str(cli_pipe / "config.txt"),
                   "--out", str(out), *inputs])
        assert rc == 0
        assert tree_digest(out) == tree_digest(cli_pipe)


class TestCaseStudyCommand:
    def test_runs_and_prints_summary(self, tmp_path, capsys):
        rc = main(["synth", "--kind", "composite", "--param", "n_segment=24",
                   "--param", "dim=6", "--seed", "0", "--out", str(tmp_path / "s")])
        assert rc == 0
        sample = next((tmp_path / "s").glob("composite*.csv"))
        rc = main(["case-study", "--input", str(sample),
                   "--set", "window_length=8", "--set", "grid_size=20",
                   "--set", "n_depths=3", "--out", str(tmp_path / "study")])
        assert rc == 0
        out = capsys.readouterr().out
        assert "raw_significant=" in out
        assert "embedded_significant=" in out
        assert (tmp_path / "study" / "cycles.csv").is_file()


@pytest.fixture(scope="module")
def feature_files(tmp_path_factory):
    rng = np.random.default_rng(0)
    base = tmp_path_factory.mktemp("vecs")
    a = rng.normal(0.0, 0.4, size=(8, 3))
    b = rng.normal(4.0, 0.4, size=(8, 3))
    np.savetxt(base / "X.csv", np.vstack([a, b]), delimiter=",")
    np.savetxt(base / "a.csv", a, delimiter=",")
    np.savetxt(base / "b.csv", b, delimiter=",")
    (base / "labels.csv").write_text("\n".join(["lo"] * 8 + ["hi"] * 8) + "\n")
    (base / "targets.csv").write_text("\n".join(["1.0"] * 8 + ["5.0"] * 8) + "\n")
    return base


class TestVectorCommands:
    def test_permtest_separated_groups(self, feature_files, tmp_path, capsys):
        report = tmp_path / "perm.txt"
        rc = main(["permtest", "--a", str(feature_files / "a.csv"),
                   "--b", str(feature_files / "b.csv"),
                   "--n-perms", "199", "--seed", "3", "--out", str(report)])
        assert rc == 0
        out = capsys.readouterr().out
        assert "p_value=0.005" in out
        assert report.read_text().startswith("observed=")

    def test_classify_separable(self, feature_files, tmp_path, capsys):
        rc = main(["classify", "--matrix", str(feature_files / "X.csv"),
                   "--labels", str(feature_files / "labels.csv"),
                   "--folds", "4", "--repeats", "2", "--seed", "1",
                   "--out", str(tmp_path / "clf")])
        assert rc == 0
        assert "accuracy_mean=1.0" in capsys.readouterr().out
        confusion = (tmp_path / "clf" / "confusion.csv").read_text()
        assert "hi,8,0" in confusion and "lo,0,8" in confusion

    def test_regress_recovers_targets(self, feature_files, tmp_path, capsys):
        est = tmp_path / "est.csv"
        rc = main(["regress", "--matrix", str(feature_files / "X.csv"),
                   "--targets", str(feature_files / "targets.csv"),
                   "--folds", "4", "--repeats", "2", "--seed", "2",
                   "--out", str(est)])
        assert rc == 0
        mae = float(capsys.readouterr().out.split("=")[1])
        assert mae < 1.0
        rows = [l for l in est.read_text().splitlines() if not l.startswith(("#", "index"))]
        assert len(rows) == 16

    def test_length_mismatch_exit_3(self, feature_files, tmp_path, capsys):
        (tmp_path / "short.csv").write_text("lo\nhi\n")
        rc = main(["classify", "--matrix", str(feature_files / "X.csv"),
                   "--labels", str(tmp_path / "short.csv"), "--seed", "1"])
        assert rc == 3
        capsys.readouterr()


class TestExitCodes:
    def test_bad_config_exits_2(self, synth_dirs, tmp_path, capsys):
        sample = str(next(synth_dirs.rglob("class1-s00.csv")))
        rc = main(["pipeline", "--set", "grid_size=1", "--seed", "1",
                   "--out", str(tmp_path / "x"), sample])
        assert rc == 2
        assert "grid_size" in capsys.readouterr().err

    def test_unknown_config_key_exits_2(self, synth_dirs, tmp_path, capsys):
        sample = str(next(synth_dirs.rglob("class1-s00.csv")))
        rc = main(["pipeline", "--set", "patches=3", "--seed", "1",
                   "--out", str(tmp_path / "x"), sample])
        assert rc == 2
        capsys.readouterr()

    def test_missing_input_exits_3(self, tmp_path, capsys):
        rc = main(["embed", "--input", str(tmp_path / "nope.csv"),
                   "--window-length", "4", "--out", str(tmp_path / "c.csv")])
        assert rc == 3
        capsys.readouterr()

    def test_numerical_failure_exits_4(self, tmp_path, capsys):
        # two constant recordings: all landscapes are zero, so the distance
        # normalization cannot find a scale
        for i in (0, 1):
            tb.save_postures(
                tb.TimeSeries(np.zeros((60, 3)), label=f"g{i}", sample_id=f"flat{i}"),
                tmp_path / f"flat{i}.csv",
            )
        rc = main(["pipeline", *FAST_SETS, "--seed", "1",
                   "--out", str(tmp_path / "out"),
                   str(tmp_path / "flat0.csv"), str(tmp_path / "flat1.csv")])
        assert rc == 4
        assert "distance" in capsys.readouterr().err

    def test_help_exits_zero(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["--help"])
        assert exc.value.code == 0
        capsys.readouterr()
