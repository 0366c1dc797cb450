import numpy as np
import pytest

from spatialmem.cli import main, read_trajectory


D = 16
CFG_TEXT = "d = 16\nL = 256.0\n"


def write_trajectory(path, rng, steps=5):
    lines = ["# test trajectory"]
    for i in range(steps):
        p = rng.uniform(0, 200, size=3)
        v = rng.normal(size=D)
        oid = f"obj{i}" if i % 2 == 0 else "-"
        lines.append(f"{i} {p[0]} {p[1]} {p[2]} {oid} "
                     + " ".join(str(x) for x in v))
    path.write_text("\n".join(lines) + "\n")


@pytest.fixture
def cfg_file(tmp_path):
    path = tmp_path / "engine.cfg"
    path.write_text(CFG_TEXT)
    return str(path)


def test_read_trajectory(tmp_path, rng):
    traj = tmp_path / "t.txt"
    write_trajectory(traj, rng, steps=3)
    records = list(read_trajectory(traj, D))
    assert len(records) == 3
    step, pos, oid, v = records[0]
    assert step == 0
    assert oid == "obj0"
    assert v.shape == (D,)
    assert records[1][2] is None


def test_read_trajectory_bad_field_count(tmp_path):
    traj = tmp_path / "t.txt"
    traj.write_text("0 1 2 3 x 0.5\n")
    with pytest.raises(ValueError):
        list(read_trajectory(traj, D))


def test_ingest_and_query(tmp_path, rng, cfg_file, capsys):
    traj = tmp_path / "t.txt"
    write_trajectory(traj, rng)
    out = tmp_path / "store.bin"
    code = main(["ingest", str(traj), str(out), "--config", cfg_file])
    assert code == 0
    assert out.exists()
    assert "ingested 5 observations" in capsys.readouterr().out

    code = main(["query", str(out), "10.0", "10.0", "10.0"])
    assert code == 0
    assert "source:" in capsys.readouterr().out


def test_query_with_embedding_file(tmp_path, rng, cfg_file, capsys):
    traj = tmp_path / "t.txt"
    write_trajectory(traj, rng)
    out = tmp_path / "store.bin"
    main(["ingest", str(traj), str(out), "--config", cfg_file])
    emb = tmp_path / "q.txt"
    np.savetxt(emb, rng.normal(size=D))
    assert main(["query", str(out), "5.0", "5.0", "5.0",
                 "--embedding", str(emb)]) == 0


def test_usage_error_exit_code(capsys):
    assert main(["--bogus-flag"]) == 1
    assert main(["query"]) == 1


def test_data_error_exit_code(tmp_path, capsys):
    missing = tmp_path / "missing.bin"
    assert main(["query", str(missing), "0", "0", "0"]) == 2
    bad = tmp_path / "bad.bin"
    bad.write_bytes(b"garbage-not-a-store")
    assert main(["query", str(bad), "0", "0", "0"]) == 2


def test_bench_subcommand(tmp_path, cfg_file, capsys):
    tsv = tmp_path / "rows.tsv"
    code = main(["bench", "--sizes", "30", "--cache-sizes", "8",
                 "--trials", "3", "--tsv", str(tsv), "--config", cfg_file])
    assert code == 0
    out = capsys.readouterr().out
    assert "STM lookup" in out
    assert tsv.read_text().startswith("component\t")


def test_verify_index_subcommand(tmp_path, rng, cfg_file, capsys):
    traj = tmp_path / "t.txt"
    write_trajectory(traj, rng, steps=30)
    out = tmp_path / "store.bin"
    main(["ingest", str(traj), str(out), "--config", cfg_file])
    code = main(["verify-index", str(out), "--queries", "10"])
    assert code == 0
    assert "recall@3=" in capsys.readouterr().out


def test_train_cycle_subcommand(cfg_file, capsys):
    code = main(["train-cycle", "--samples", "8", "--steps", "5",
                 "--config", cfg_file])
    assert code == 0
    assert "loss:" in capsys.readouterr().out


def test_ablate_subcommand(tmp_path, capsys):
    cfg = tmp_path / "small.cfg"
    cfg.write_text("d = 16\n")
    code = main(["ablate", "--episodes", "1", "--config", str(cfg)])
    assert code == 0
    out = capsys.readouterr().out
    assert "full" in out
    assert "random-baseline" in out
