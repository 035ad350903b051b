import csv
import io
import json
import shutil

import numpy as np
import pytest

from desc import harness
from desc.cli import main
from desc.config import RunConfig, load_config, parse_config_text
from desc.errors import (
    ConfigError,
    DuplicateId,
    MalformedRow,
    TooFewSamplesPerClass,
    UnparseableLabel,
    VersionMismatch,
)
from desc.features import FEATURE_NAMES, extract_features
from desc.resources import load_resources
from desc.synthetic import generate_corpus, write_corpus
from desc.text import tokenize

FAST = """\
task = binary
seed = 3
positive_class = ironic
hidden = 4
dense = 4
dnn_widths = 16,8,8,4,4
max_len = 12
epochs = 6
batch_size = 16
learning_rate = 0.03
cv_folds = 2
validation_fraction = 0
"""


def write(path, text):
    path.write_text(text, encoding="utf-8")
    return path


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli")
    rows = generate_corpus(80, seed=4)
    write_corpus(rows[:60], root / "train.tsv")
    write_corpus(rows[60:], root / "test.tsv")
    write(root / "run.cfg", FAST)
    assert main(["train", "--config", str(root / "run.cfg"), "--input", str(root / "train.tsv"),
                 "--model-dir", str(root / "model")]) == 0
    return root


# ---------------------------------------------------------------- ingestion


def test_ingest_binary_row(tmp_path):
    path = write(tmp_path / "d.tsv", "# id\tlabel\ttext\n1\tironic\tyeah right\n2\tliteral\tnice day\n")
    docs, labels = harness.ingest(path, "binary", positive_class="ironic")
    assert labels.classes == ["literal", "ironic"]
    assert docs[0].label == labels.ids["ironic"] == 1
    assert docs[0].doc_id == "1" and [t.surface for t in docs[0].tokens] == ["yeah", "right"]


def test_ingest_sentiment_scores(tmp_path):
    path = write(tmp_path / "s.tsv", "2\t+3\tlovely day\n3\t-5\tawful\n")
    docs, labels = harness.ingest(path, "sentiment11")
    assert [d.score for d in docs] == [3, -5]
    assert [d.label for d in docs] == [8, 0]
    assert labels.classes[8] == "3"


@pytest.mark.parametrize(
    "text, error",
    [
        ("1\t7\tway too happy\n", UnparseableLabel),
        ("1\tgood\tnot a score\n", UnparseableLabel),
        ("1\t3\n", MalformedRow),
        ("1\t3\tok\n1\t2\tagain\n", DuplicateId),
        ("1\t\tunlabeled\n", UnparseableLabel),
    ],
)
def test_ingest_rejects_bad_sentiment_rows(tmp_path, text, error):
    with pytest.raises(error):
        harness.ingest(write(tmp_path / "bad.tsv", text), "sentiment11")


def test_malformed_row_reports_line_number(tmp_path):
    path = write(tmp_path / "bad.tsv", "# header\n1\ta\tx\nbroken line\n")
    with pytest.raises(MalformedRow, match="3"):
        harness.ingest(path, "binary")


def test_binary_needs_two_label_names(tmp_path):
    with pytest.raises(UnparseableLabel):
        harness.ingest(write(tmp_path / "d.tsv", "1\ta\tx\n2\tb\ty\n3\tc\tz\n"), "binary")


# ---------------------------------------------------------------- configuration


def test_config_is_fail_closed(tmp_path):
    with pytest.raises(ConfigError, match="unknown key"):
        parse_config_text("epochz = 3\n")
    with pytest.raises(ConfigError, match="duplicate"):
        parse_config_text("seed = 1\nseed = 2\n")
    with pytest.raises(ConfigError):
        load_config(write(tmp_path / "c.cfg", "task = regression\n"))
    with pytest.raises(ConfigError, match="not found"):
        load_config(write(tmp_path / "c.cfg", "vader = missing.tsv\n"))


def test_config_resolves_relative_resources(tmp_path):
    write(tmp_path / "lex.tsv", "good\t1\t0\n")
    cfg = load_config(write(tmp_path / "c.cfg", "vader = lex.tsv\nseed = 4\nepochs = 2\n"))
    assert cfg.resources["vader"] == str((tmp_path / "lex.tsv").resolve())
    assert cfg.train.epochs == 2 and cfg.train.seed == 4


def test_seed_is_required(tmp_path, capsys):
    data = tmp_path / "d.tsv"
    write_corpus(generate_corpus(20, seed=0), data)
    cfg = write(tmp_path / "c.cfg", "task = binary\n")
    assert main(["train", "--config", str(cfg), "--input", str(data), "--model-dir", str(tmp_path / "m")]) == 2
    assert "seed" in capsys.readouterr().err
    assert not (tmp_path / "m").exists()
    with pytest.raises(ConfigError):
        RunConfig().require_seed()


# ---------------------------------------------------------------- train / evaluate / predict


def test_train_layout(workspace):
    model = workspace / "model"
    manifest = json.loads((model / "manifest.json").read_text())
    assert [m["name"] for m in manifest["members"]] == ["DNN", "BILSTM", "ATTLSTM"]
    assert manifest["classes"] == ["literal", "ironic"]
    for m in manifest["members"]:
        assert harness.sha256_file(model / m["path"]) == m["sha256"]
    report = json.loads((model / "reports" / "weights.json").read_text())
    assert sum(report["weights"].values()) == pytest.approx(1.0, abs=1e-12)
    for name in ("weights.txt", "loss_curves.png", "weights.png", "train_losses.json"):
        assert (model / "reports" / name).is_file()
    assert not list(workspace.glob(".desc-train-*"))


def test_train_is_reproducible(workspace, tmp_path):
    assert main(["train", "--config", str(workspace / "run.cfg"), "--input", str(workspace / "train.tsv"),
                 "--model-dir", str(tmp_path / "again")]) == 0
    for name in ("reports/weights.json", "reports/weights.txt", "manifest.json"):
        assert (tmp_path / "again" / name).read_bytes() == (workspace / "model" / name).read_bytes()


def test_failed_train_leaves_nothing(workspace, tmp_path):
    data = write(tmp_path / "tiny.tsv", "".join(f"{i}\t{['literal', 'ironic'][i % 2]}\tword {i}\n" for i in range(6)))
    cfg = load_config(workspace / "run.cfg")
    cfg.cv_folds = 5
    with pytest.raises(TooFewSamplesPerClass):
        harness.cmd_train(cfg, data, tmp_path / "out")
    assert not (tmp_path / "out").exists()
    assert not list(tmp_path.glob(".desc-train-*"))


def test_evaluate_report(workspace, capsys):
    out = workspace / "eval"
    assert main(["evaluate", "--model-dir", str(workspace / "model"), "--input", str(workspace / "test.tsv"),
                 "--out", str(out)]) == 0
    report = json.loads((out / "metrics.json").read_text())["models"]
    assert set(report) == {"DNN", "BILSTM", "ATTLSTM", "DESC"}
    for metrics in report.values():
        assert {"accuracy", "precision", "recall", "f1", "auc"} <= set(metrics)
        assert {"positive_precision", "positive_recall", "positive_f1"} <= set(metrics)
    roc = (out / "roc_desc.csv").read_text().splitlines()
    assert roc[0] == "fpr,tpr" and roc[1] == "0.0,0.0" and roc[-1] == "1.0,1.0"
    assert (out / "roc.png").is_file() and (out / "metrics.txt").is_file()
    assert "DESC" in capsys.readouterr().out


def test_unlabeled_test_rows_leave_training_artifacts_alone(workspace, tmp_path):
    model = workspace / "model"
    before = {k: v for k, v in harness.digest_tree(model).items() if not k.startswith("evaluation")}
    extra = (workspace / "test.tsv").read_text() + "u1\t\tobviously lovely monday\nu2\t\tso sad\n"
    harness.cmd_evaluate(None, model, write(tmp_path / "t.tsv", extra), tmp_path / "ev")
    after = {k: v for k, v in harness.digest_tree(model).items() if not k.startswith("evaluation")}
    assert before == after


def test_corrupted_member_is_refused(workspace, tmp_path):
    copy = tmp_path / "model"
    shutil.copytree(workspace / "model", copy)
    dnn = copy / "models" / "dnn.json"
    dnn.write_text(dnn.read_text().replace("0", "1", 1))
    with pytest.raises(VersionMismatch):
        harness.load_ensemble(copy)
    assert main(["predict", "--model-dir", str(copy), "--input", str(workspace / "test.tsv")]) == 2


def test_predict_rows_and_empty_input(workspace, tmp_path, capsys):
    text = harness.cmd_predict(workspace / "model", workspace / "test.tsv")
    rows = list(csv.reader(io.StringIO(text), delimiter="\t"))
    assert rows[0] == ["id", "prediction", "p_literal", "p_ironic"]
    ids = [line.split("\t")[0] for line in (workspace / "test.tsv").read_text().splitlines()[1:]]
    assert [r[0] for r in rows[1:]] == ids
    for r in rows[1:]:
        p = np.array(r[2:], dtype=float)
        assert abs(p.sum() - 1) < 1e-9 and r[1] == ["literal", "ironic"][int(p.argmax())]
    empty = write(tmp_path / "empty.tsv", "# id\tlabel\ttext\n")
    assert main(["predict", "--model-dir", str(workspace / "model"), "--input", str(empty),
                 "--out", str(tmp_path)]) == 0
    assert (tmp_path / "predictions.tsv").read_text() == "id\tprediction\tp_literal\tp_ironic\n"


def test_extract_features_header(workspace, tmp_path):
    assert main(["extract-features", "--config", str(workspace / "run.cfg"), "--input",
                 str(workspace / "test.tsv"), "--out", str(tmp_path)]) == 0
    rows = list(csv.reader(open(tmp_path / "features.csv")))
    assert rows[0] == list(FEATURE_NAMES)
    assert len(rows) == 21


def test_profile_matches_extracted_features(workspace, tmp_path):
    data = write(tmp_path / "toy.tsv", "a\tironic\tobviously love mondays\nb\tliteral\tsad day\n"
                                       "c\tironic\tgreat, more rain 🙄\nd\tliteral\tlovely lovely\n")
    assert main(["profile", "--config", str(workspace / "run.cfg"), "--input", str(data),
                 "--out", str(tmp_path / "p")]) == 0
    assert main(["extract-features", "--config", str(workspace / "run.cfg"), "--input", str(data),
                 "--out", str(tmp_path / "f")]) == 0
    feats = np.array([[float(x) for x in r] for r in list(csv.reader(open(tmp_path / "f" / "features.csv")))[1:]])
    profile = json.loads((tmp_path / "p" / "profile.json").read_text())["classes"]
    ironic = np.array([profile["ironic"]["means"][n] for n in FEATURE_NAMES])
    literal = np.array([profile["literal"]["means"][n] for n in FEATURE_NAMES])
    assert np.allclose(ironic, (feats[0] + feats[2]) / 2, atol=1e-12)
    assert np.allclose(literal, (feats[1] + feats[3]) / 2, atol=1e-12)
    assert (tmp_path / "p" / "profile.png").is_file()


def test_memorizable_set_evaluates_perfectly(tmp_path):
    rows = "".join(
        f"{i}\t{'ironic' if i % 2 else 'literal'}\t{'obviously love this' if i % 2 else 'hate this so much'} {i}\n"
        for i in range(10)
    )
    data = write(tmp_path / "toy.tsv", rows)
    cfg = write(tmp_path / "c.cfg", FAST.replace("epochs = 6", "epochs = 40").replace("learning_rate = 0.03",
                                                                                       "learning_rate = 0.05"))
    assert main(["train", "--config", str(cfg), "--input", str(data), "--model-dir", str(tmp_path / "m")]) == 0
    report = harness.cmd_evaluate(None, tmp_path / "m", data)
    assert report["DESC"]["accuracy"] == 1.0
    assert (tmp_path / "m" / "evaluation" / "metrics.json").is_file()


def test_sentiment_task_reports_cosine_and_mse(tmp_path):
    rows = "".join(f"{s}{k}\t{s:+d}\t{'love ' * max(s, 0)}{'hate ' * max(-s, 0)}day {k}\n"
                   for s in range(-5, 6) for k in range(3))
    data = write(tmp_path / "sent.tsv", rows)
    cfg = write(tmp_path / "c.cfg", FAST.replace("task = binary", "task = sentiment11")
                .replace("positive_class = ironic\n", "").replace("cv_folds = 2", "cv_folds = 2\ndecode = expectation"))
    assert main(["train", "--config", str(cfg), "--input", str(data), "--model-dir", str(tmp_path / "m")]) == 0
    report = harness.cmd_evaluate(None, tmp_path / "m", data)
    assert all(set(m) == {"cosine", "mse"} for m in report.values())
    pred = harness.cmd_predict(tmp_path / "m", data)
    header = pred.splitlines()[0].split("\t")
    assert header[:3] == ["id", "prediction", "p_-5"] and header[-1] == "score"


def test_usage_errors(capsys):
    assert main(["evaluate", "--input", "x.tsv"]) == 2
    assert "--model-dir" in capsys.readouterr().err
    with pytest.raises(SystemExit):
        main(["fly"])


def test_extract_without_labels_accepts_any_label_column(workspace, tmp_path):
    data = write(tmp_path / "raw.tsv", "1\t\tjust text here\n2\t?\tmore text\n")
    text = harness.cmd_extract_features(load_config(workspace / "run.cfg"), data)
    lines = text.splitlines()
    assert len(lines) == 3
    cfg = load_config(workspace / "run.cfg")
    first = np.array(lines[1].split(","), dtype=float)
    assert np.array_equal(first, extract_features(tokenize("just text here"), load_resources(cfg.resources)))
