import json
import subprocess
import sys

import numpy as np
import pytest

from nextcmd import cli
from nextcmd.config import RunConfig
from nextcmd.errors import ConfigError
from nextcmd.evaluation import MetricsReport
from nextcmd.pipeline import TrainedModel

REPORT_FIELDS = {"accuracy", "per_class_auc", "micro_auc", "weighted_auc", "auc_mean", "auc_std",
                 "auc_min", "auc_max", "absent_classes", "n_rows", "majority_baseline", "config",
                 "generated_at"}


def run(argv, capsys, stdin=None, monkeypatch=None):
    if stdin is not None:
        import io
        monkeypatch.setattr(sys, "stdin", io.StringIO(stdin))
    code = cli.main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    d = tmp_path_factory.mktemp("cli")
    cfg = {
        "paths": {"corpus": str(d / "corpus.jsonl")},
        "synth": {"preset": "order1", "session_count": 60, "seed": 5},
        "extract": {"max_prefix_window": 2},
        "eval": {"k": 3},
    }
    (d / "fixture.cfg").write_text(json.dumps(cfg))
    assert cli.main(["generate", "--config", str(d / "fixture.cfg")]) == 0
    return d


class TestPipeline:
    def test_generate_writes_corpus_and_truth(self, workdir):
        truth = json.loads((workdir / "corpus.jsonl.truth.json").read_text())
        n_lines = sum(1 for _ in open(workdir / "corpus.jsonl"))
        assert truth["total_events"] == n_lines > 0

    def test_evaluate_report_has_all_fields(self, workdir, capsys):
        code, out, err = run(["evaluate", "--config", workdir / "fixture.cfg",
                              "--model", "nb-bernoulli", "--ngram", "1:3"], capsys)
        assert code == 0, err
        report = json.loads(out)
        assert set(report) == REPORT_FIELDS
        assert report["config"]["features"]["ngram_range"] == [1, 3]
        assert report["config"]["model"]["kind"] == "nb-bernoulli"
        assert 0 < report["accuracy"] <= 1 and report["generated_at"]

    def test_stage_by_stage_matches_direct_evaluate(self, workdir, capsys):
        d = workdir
        assert run(["ingest-stats", "--input", d / "corpus.jsonl", "--output", d / "stats.json"],
                   capsys)[0] == 0
        stats = json.loads((d / "stats.json").read_text())
        truth = json.loads((d / "corpus.jsonl.truth.json").read_text())
        assert stats["removed_by_dedup"] == truth["injected_duplicates"]
        assert run(["cleanse", "--input", d / "corpus.jsonl", "--output", d / "streams.jsonl"],
                   capsys)[0] == 0
        assert run(["extract", "--input", d / "streams.jsonl", "--output", d / "rows.jsonl",
                    "--max-prefix-window", "2"], capsys)[0] == 0
        assert (d / "rows.jsonl.targets.json").exists()
        base = ["--config", d / "fixture.cfg", "--model", "logreg", "--ngram", "1:2"]
        c1, staged, _ = run(["evaluate", "--input", d / "rows.jsonl"] + base, capsys)
        c2, direct, _ = run(["evaluate"] + base, capsys)
        assert c1 == c2 == 0
        a = MetricsReport.from_json(staged).comparable()
        b = MetricsReport.from_json(direct).comparable()
        assert a["accuracy"] == b["accuracy"] and a["per_class_auc"] == b["per_class_auc"]

    def test_rerun_byte_identical_modulo_timestamp(self, workdir, capsys):
        argv = ["evaluate", "--config", workdir / "fixture.cfg", "--model", "nb-multinomial"]
        outs = [run(argv, capsys)[1] for _ in range(2)]
        strip = [json.dumps(MetricsReport.from_json(o).comparable(), sort_keys=True) for o in outs]
        assert strip[0] == strip[1]

    def test_train_predict(self, workdir, capsys, monkeypatch):
        model_path = workdir / "model.json"
        code, _, err = run(["train", "--config", workdir / "fixture.cfg", "--model", "logreg",
                            "--ngram", "1:2", "--output", model_path], capsys)
        assert code == 0, err
        code, out, err = run(["predict", "--model", model_path, "-k", "3"], capsys,
                             stdin="\nEditEvent CommandEvent-Build\n", monkeypatch=monkeypatch)
        assert code == 0, err
        lines = [json.loads(l) for l in out.splitlines()]
        assert [l["prefix"] for l in lines] == [[], ["EditEvent", "CommandEvent-Build"]]
        model = TrainedModel.from_json(model_path.read_text())
        full = model.predict_proba([()])[0]
        assert full.sum() == pytest.approx(1.0, abs=1e-9)
        top = lines[0]["top"]
        assert len(top) == 3
        assert [t["prob"] for t in top] == sorted(full, reverse=True)[:3]
        assert top[0]["class"] == model.classes[int(np.argmax(full))]

    def test_report_table(self, workdir, capsys):
        paths = []
        for kind in ("nb-bernoulli", "logreg"):
            p = workdir / f"{kind}.report.json"
            assert run(["evaluate", "--config", workdir / "fixture.cfg", "--model", kind,
                        "--output", p], capsys)[0] == 0
            paths.append(p)
        code, out, _ = run(["report"] + paths, capsys)
        assert code == 0
        lines = out.splitlines()
        assert "Micro AUC" in lines[0] and "Accuracy (3-fold)" in lines[0]
        assert lines[2].startswith("Bernoulli Naive Bayes") and lines[3].startswith("Logistic")

    def test_sample_size(self, workdir, capsys):
        code, out, _ = run(["evaluate", "--config", workdir / "fixture.cfg", "--sample-size", "50"],
                           capsys)
        assert code == 0 and json.loads(out)["n_rows"] == 50


class TestErrors:
    def _one_json_line(self, err):
        lines = err.strip().splitlines()
        assert len(lines) == 1
        obj = json.loads(lines[0])
        assert set(obj) == {"stage", "message"}
        return obj

    def test_unknown_config_key_exits_1(self, tmp_path, capsys):
        (tmp_path / "bad.cfg").write_text(json.dumps({"model": {"kind": "nb-bernoulli", "alpah": 1}}))
        code, _, err = run(["evaluate", "--config", tmp_path / "bad.cfg"], capsys)
        assert code == 1
        assert self._one_json_line(err)["stage"] == "evaluate"

    def test_usage_error_exits_1(self, capsys):
        code, _, err = run(["evaluate", "--ngram", "three"], capsys)
        assert code == 1
        self._one_json_line(err)
        assert run(["frobnicate"], capsys)[0] == 1

    def test_missing_path_exits_1(self, capsys):
        assert run(["cleanse"], capsys)[0] == 1

    def test_strict_malformed_exits_2(self, tmp_path, capsys):
        (tmp_path / "c.jsonl").write_text('{"not": "an event"}\n')
        code, _, err = run(["ingest-stats", "--input", tmp_path / "c.jsonl", "--strict"], capsys)
        assert code == 2
        assert self._one_json_line(err)["stage"] == "ingest-stats"

    def test_missing_file_exits_2(self, tmp_path, capsys):
        code, _, err = run(["cleanse", "--input", tmp_path / "none.jsonl",
                            "--output", tmp_path / "o.jsonl"], capsys)
        assert code == 2
        self._one_json_line(err)

    @pytest.mark.filterwarnings("ignore::RuntimeWarning")
    def test_divergence_exits_3(self, workdir, tmp_path, capsys):
        cfg = json.loads((workdir / "fixture.cfg").read_text())
        cfg["model"] = {"kind": "nn", "hidden": [8, 4], "epochs": 1, "learning_rate": 1e200}
        (tmp_path / "div.cfg").write_text(json.dumps(cfg))
        code, _, err = run(["evaluate", "--config", tmp_path / "div.cfg"], capsys)
        assert code == 3
        assert "epoch" in self._one_json_line(err)["message"]


class TestConfig:
    def test_flags_override_config(self, workdir):
        args = cli.build_parser().parse_args(
            ["evaluate", "--config", str(workdir / "fixture.cfg"), "--top-k", "4", "--seed", "9"])
        cfg = cli.load_config(args)
        assert cfg.selection.k == 4 and cfg.seed == 9 and cfg.model.seed == 9
        assert cfg.max_prefix_window == 2

    def test_round_trip(self):
        cfg = RunConfig.from_dict({"extract": {"coverage": 0.9}, "model": {"kind": "logreg"}})
        assert RunConfig.from_dict(cfg.to_dict()).to_dict() == cfg.to_dict()

    @pytest.mark.parametrize("bad", [
        {"extract": {"top_k": 3, "coverage": 0.5}},
        {"eval": {"k": 1}},
        {"pipeline": {"run_key": "weird"}},
        {"features": {"ngram_range": [3, 1]}},
        {"surprise": {}},
    ])
    def test_rejects(self, bad):
        with pytest.raises(ConfigError):
            RunConfig.from_dict(bad)


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "nextcmd", "report"], capture_output=True, text=True)
    assert proc.returncode == 1
    json.loads(proc.stderr)
