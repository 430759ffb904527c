import numpy as np
import pytest

from diracwalk.cli import (
    ParseError,
    ValidationError,
    main,
    parse_config,
    run_scenario,
)


def _write(tmp_path, text, name="run.cfg"):
    path = tmp_path / name
    path.write_text(text)
    return path


def test_minimal_config_fills_documented_defaults(tmp_path):
    cfg = parse_config(_write(tmp_path, "scenario=gem\n"))
    assert cfg.scenario == "gem"
    assert cfg.g == -0.2
    assert cfg.sigma2 == 300.0
    assert cfg.eps == 1.0
    assert cfg.coin_variant == "rotation"
    assert cfg.unitarize_strategy == "auto"
    assert cfg.packet_center() == 1024.0


def test_config_comments_and_values(tmp_path):
    cfg = parse_config(_write(tmp_path, """
# full line comment
scenario=flat
nSites=128   # trailing comment
mix=0.6, 0.8j
steps=5
"""))
    assert cfg.n_sites == 128
    assert cfg.mix == (0.6 + 0j, 0.8j)
    assert cfg.steps == 5


def test_parse_errors_carry_line_and_key(tmp_path):
    with pytest.raises(ParseError, match="run.cfg:2"):
        parse_config(_write(tmp_path, "scenario=flat\nnonsense line\n"))
    with pytest.raises(ParseError, match="unknown key 'bogus'"):
        parse_config(_write(tmp_path, "bogus=1\n"))
    with pytest.raises(ParseError, match="bad value for nSites"):
        parse_config(_write(tmp_path, "nSites=many\n"))
    with pytest.raises(ParseError, match="duplicate key 'steps'"):
        parse_config(_write(tmp_path, "steps=1\nsteps=2\n"))
    with pytest.raises(ParseError):
        parse_config(tmp_path / "missing.cfg")


def test_validation_lists_every_violation(tmp_path):
    with pytest.raises(ValidationError) as err:
        parse_config(_write(tmp_path, "scenario=warp\nsteps=-5\neps=0\n"))
    message = str(err.value)
    assert "scenario" in message
    assert "steps must be >= 0" in message
    assert "eps must be finite and positive" in message


def test_custom_metric_requires_expressions(tmp_path):
    with pytest.raises(ValidationError, match="requires g00"):
        parse_config(_write(tmp_path, "scenario=custom-metric\n"))
    with pytest.raises(ValidationError, match="g01"):
        parse_config(_write(tmp_path,
                            "scenario=custom-metric\ng00=1\ng01=si(x0)\ng11=-1\n"))
    # metric expressions outside custom-metric are a config mistake
    with pytest.raises(ValidationError, match="only meaningful"):
        parse_config(_write(tmp_path, "scenario=gem\ng00=1\n"))


def test_run_scenario_outputs(tmp_path):
    cfg = parse_config(_write(tmp_path, f"""
scenario=gem
nSites=256
steps=12
sigma2=30
snapshotCadence=3
outputDir={tmp_path}/out
"""))
    record, written = run_scenario(cfg)
    names = [p.name for p in written]
    assert names == ["record.csv", "density.txt", "density.pgm", "oracle.csv",
                     "report.png"]
    for p in written:
        assert p.exists() and p.stat().st_size > 0

    assert len(record.js) == 13
    table = np.genfromtxt(written[0], delimiter=",", skip_header=1)
    assert table.shape == (13, 4)
    density = np.loadtxt(written[1])
    assert density.shape == (4, 256)  # floor(12/3) snapshot rows
    header = written[2].read_bytes()[:15]
    assert header.startswith(b"P5\n256 4\n255\n")
    oracle = np.genfromtxt(written[3], delimiter=",", skip_header=1)
    assert oracle.shape == (13, 3)
    assert oracle[0, 1] == 128.0  # rays start at the packet center


def test_runs_are_bit_deterministic(tmp_path):
    text = f"scenario=gem\nnSites=128\nsteps=8\nsigma2=16\noutputDir={tmp_path}/a\n"
    _, first = run_scenario(parse_config(_write(tmp_path, text, "a.cfg")))
    text = text.replace("/a", "/b")
    _, second = run_scenario(parse_config(_write(tmp_path, text, "b.cfg")))
    for pa, pb in zip(first, second):
        if pa.suffix == ".png":
            continue  # figure bytes depend on the matplotlib build
        assert pa.read_bytes() == pb.read_bytes(), pa.name


def test_flat_delta_run_is_exact_transport(tmp_path):
    cfg = parse_config(_write(tmp_path, f"""
scenario=flat
unitarizeStrategy=affine
nSites=64
steps=10
sigma2=0
p0=32
mix=1,0
outputDir={tmp_path}/out
"""))
    record, written = run_scenario(cfg)
    assert record.norm_drift() == 0.0
    density = np.loadtxt(written[1])
    for row, j in zip(density, range(1, 11)):
        assert row[32 - j] == 1.0
        assert np.sum(row) == 1.0


def test_flat_hybrid_mixes_flavors(tmp_path):
    cfg = parse_config(_write(tmp_path, f"""
scenario=flat-hybrid
nSites=128
steps=60
mass=0.2
mix=0.7,0.7
outputDir={tmp_path}/out
"""))
    record, _ = run_scenario(cfg)
    assert record.norm_drift() < 1e-10


def test_custom_metric_run(tmp_path):
    cfg = parse_config(_write(tmp_path, f"""
scenario=custom-metric
g00=1
g01=-0.2*sin(0.05*x0)
g11=-1
nSites=128
steps=15
sigma2=16
outputDir={tmp_path}/out
"""))
    record, written = run_scenario(cfg)
    assert record.norm_drift() < 1e-12
    assert record.oracle_x0 is not None  # integrated rays still exported


def test_env_var_overrides_output_dir(tmp_path, monkeypatch):
    target = tmp_path / "redirected"
    monkeypatch.setenv("DIRACWALK_OUTPUT_DIR", str(target))
    cfg = parse_config(_write(
        tmp_path, f"scenario=flat\nnSites=64\nsteps=3\nsigma2=9\n"
                  f"outputDir={tmp_path}/ignored\n"))
    _, written = run_scenario(cfg)
    assert all(p.parent == target for p in written)
    assert not (tmp_path / "ignored").exists()


def test_main_exit_codes(tmp_path, capsys):
    bad = _write(tmp_path, "steps=-1\n", "bad.cfg")
    assert main(["run", str(bad)]) == 3
    assert "config error" in capsys.readouterr().err

    sig = _write(tmp_path, f"""
scenario=custom-metric
g00=-1
g01=0
g11=-1
nSites=32
steps=2
sigma2=4
outputDir={tmp_path}/out
""", "sig.cfg")
    assert main(["run", str(sig)]) == 2
    assert "runtime error" in capsys.readouterr().err

    assert main(["run", str(tmp_path / "absent.cfg")]) == 3
    capsys.readouterr()

    assert main(["validate", "nope", "--seed", "1"]) == 3
    capsys.readouterr()


def test_main_version_and_run_summary(tmp_path, capsys):
    assert main(["version"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("diracwalk ")

    cfg = _write(tmp_path, f"scenario=flat\nnSites=64\nsteps=4\nsigma2=9\n"
                           f"outputDir={tmp_path}/out\n")
    assert main(["run", str(cfg)]) == 0
    out = capsys.readouterr().out
    assert "norm drift" in out
    assert out.count("wrote ") == 5


def test_main_validate_reports_checks(capsys):
    assert main(["validate", "geometry", "--seed", "3"]) == 0
    out = capsys.readouterr().out
    assert "[pass]" in out
    assert "suite geometry: passed" in out
