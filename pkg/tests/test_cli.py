import json

from semacc.cli import main


def test_blobs_then_evaluate(tmp_path, capsys):
    assert main(["blobs", "--out", str(tmp_path / "d"), "--classes", "3", "--dim", "8", "--per-class", "20"]) == 0
    capsys.readouterr()
    rc = main(["evaluate", "--real", str(tmp_path / "d" / "real.csv"), "--synthetic", str(tmp_path / "d" / "synthetic.csv"),
               "--out", str(tmp_path / "o"), "--plot-modes", "class,real-vs-synth"])
    assert rc == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["clustering_accuracy_real"] >= 0.95
    assert (tmp_path / "o" / "plot_real_vs_synthetic.svg").exists()
    assert not (tmp_path / "o" / "plot_correct.svg").exists()


def test_stage_commands(tmp_path, capsys):
    main(["blobs", "--out", str(tmp_path / "d"), "--classes", "2", "--dim", "6", "--per-class", "15"])
    real, synth = str(tmp_path / "d" / "real.csv"), str(tmp_path / "d" / "synthetic.csv")
    assert main(["embed", "--real", real, "--synthetic", synth, "--out", str(tmp_path / "e"), "--tsne-iters", "300"]) == 0
    emb = str(tmp_path / "e" / "embedding.csv")
    assert main(["cluster", "--embedding", emb, "--out", str(tmp_path / "c"), "--real", real]) == 0
    assert main(["plot", "--embedding", emb, "--classification", str(tmp_path / "c" / "classification.csv"),
                 "--out", str(tmp_path / "p"), "--plot-modes", "correct"]) == 0
    assert (tmp_path / "p" / "plot_correct.svg").exists()


def test_score_command(tmp_path, capsys):
    f = tmp_path / "p.csv"
    f.write_text("# classes: a,b\nid,label,p0,p1\nx,a,1,0\ny,b,0,1\n")
    assert main(["score", "--probs", str(f), "--splits", "1"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["inception_score"]["mean"] == 2.0 and out["direct_accuracy"] == 1.0


def test_errors_exit_nonzero(tmp_path, capsys):
    assert main(["score", "--probs", str(tmp_path / "missing.csv")]) == 2
    assert "not found" in capsys.readouterr().err
    assert main(["plot", "--embedding", str(tmp_path / "missing.csv"), "--out", str(tmp_path)]) == 2
