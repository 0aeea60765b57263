import shutil
import subprocess
import sys

import pytest

from ifskit import formats
from ifskit.cli import NO_SEMIFRACTAL, main
from ifskit.corpus import config_path, load_example


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_verify_cantor_stable(capsys):
    code, out, _ = run(["verify", "--example", "cantor_stable"], capsys)
    assert code == 0
    assert "conley: FailsWithWitness" in out
    assert "stability: StableWitness" in out
    assert "global_equivalence: BothFail" in out


def test_chaos_without_semifractal(tmp_path, capsys):
    code, _, err = run(["chaos", "--example", "involution", "--out", tmp_path], capsys)
    assert code == 3
    assert NO_SEMIFRACTAL in err


def test_chaos_writes_outputs(tmp_path, capsys):
    code, out, _ = run(["chaos", "--example", "cantor_stable", "--steps", "50000", "--out", tmp_path,
                        "--orbit-csv"], capsys)
    assert code == 0 and out.startswith("chaos_game: Converged")
    for name in ("chaos.csv", "tail.pgm", "overlay.ppm", "orbit.csv"):
        assert (tmp_path / name).exists()
    assert formats.load_set(tmp_path / "tail.pgm").grid == load_example("cantor_stable").grid()


def test_semifractal_porcupine(tmp_path, capsys):
    code, out, _ = run(["semifractal", "--example", "porcupine", "--tol", "1e-3", "--out", tmp_path], capsys)
    assert code == 0 and "dH_to_domain=0" in out


def test_iterate_and_maxfix(tmp_path, capsys):
    code, out, _ = run(["iterate", "--example", "cantor_classic", "--point", "0", "--out", tmp_path], capsys)
    assert code == 0 and out.startswith("iterate: Converged")
    assert (tmp_path / "iterate.csv").read_text().startswith("step,hausdorff")
    code, out, _ = run(["maxfix", "--example", "cantor_stable", "--out", tmp_path], capsys)
    assert code == 0 and "forward_invariant=True" in out


def test_iterate_from_start_file(tmp_path, capsys):
    g = load_example("cantor_classic").grid()
    formats.save_set(g.singleton([0.5]), tmp_path / "start.rle")
    code, _, _ = run(["iterate", "--example", "cantor_classic", "--start", tmp_path / "start.rle",
                      "--out", tmp_path], capsys)
    assert code == 0


def test_target(tmp_path, capsys):
    code, out, _ = run(["target", "--example", "cantor_classic", "--max-len", "8", "--eps", "0.01",
                        "--out", tmp_path], capsys)
    assert code == 0 and "32 certified points" in out
    assert len((tmp_path / "target.csv").read_text().splitlines()) == 33


def test_render_and_hausdorff(tmp_path, capsys):
    g = load_example("cantor_classic").grid()
    a, b = g.from_intervals([[0, 0.25]]), g.from_intervals([[0, 0.5]])
    formats.save_set(a, tmp_path / "a.rle")
    formats.save_set(b, tmp_path / "b.rle")
    code, out, _ = run(["hausdorff", tmp_path / "a.rle", tmp_path / "b.rle"], capsys)
    assert code == 0
    fields = dict(kv.split("=") for kv in out.split())
    assert float(fields["hausdorff"]) == pytest.approx(0.25, abs=g.unit)
    assert float(fields["h_ab"]) == 0
    code, _, _ = run(["render", tmp_path / "a.rle", "--out", tmp_path / "a.pgm"], capsys)
    assert code == 0 and formats.load_set(tmp_path / "a.pgm") == a
    code, _, _ = run(["render", tmp_path / "a.rle", "--overlay", tmp_path / "b.rle",
                      "--out", tmp_path / "ab.ppm"], capsys)
    assert code == 0 and (tmp_path / "ab.ppm").read_bytes()[:2] == b"P6"


def test_run_shipped_config(capsys):
    code, out, _ = run(["run", config_path("bony")], capsys)
    assert code == 0 and "target_covers: Holds" in out


def test_run_custom_config(tmp_path, capsys):
    cfg = tmp_path / "halves.cfg"
    cfg.write_text("domain 1 0 1\nmap a affine 1/2 0\nmap b affine 1/2 1/2\ngrid 1024\n")
    code, out, _ = run(["run", cfg], capsys)
    assert code == 0
    assert "example: (custom)" in out and "global_equivalence: BothHold" in out


@pytest.mark.parametrize("argv", [
    ["verify", "--config", "missing.cfg"],
    ["verify", "--example", "cantor_classic", "--grid", "1000"],
    ["verify", "--example", "cantor_classic", "--tol", "1e-9"],
])
def test_bad_input_exit_code(argv, capsys):
    code, _, err = run(argv, capsys)
    assert code == 2 and err


def test_bad_weights_config(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("domain 1 0 1\nmap a affine 1/2 0\nmap b affine 1/2 1/2\nweights 0.5 0.6\n")
    code, _, err = run(["run", cfg], capsys)
    assert code == 2 and "weights sum 1.1" in err and "line 4" in err


def test_unknown_example_rejected(capsys):
    with pytest.raises(SystemExit) as e:
        main(["verify", "--example", "koch"])
    assert e.value.code == 2


def test_outputs_are_deterministic(tmp_path, capsys):
    outs = []
    for d in ("one", "two"):
        out_dir = tmp_path / d
        argv = ["chaos", "--example", "cantor_classic", "--random", "--seed", "5", "--steps", "20000",
                "--out", out_dir, "--orbit-csv"]
        code, text, _ = run(argv, capsys)
        assert code == 0
        outs.append((text, {p.name: p.read_bytes() for p in sorted(out_dir.iterdir())}))
    assert outs[0] == outs[1]


@pytest.mark.skipif(shutil.which("ifs") is None, reason="console script not installed")
def test_console_script():
    res = subprocess.run(["ifs", "semifractal", "--example", "cantor_classic", "--out", "/tmp/ifs-cli-test"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.startswith("semifractal: Converged")


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "ifskit.cli", "hausdorff", "--help"], capture_output=True, text=True)
    assert res.returncode == 0 and "usage" in res.stdout
