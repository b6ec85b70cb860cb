import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bresse.cli import EXIT_CONFIG, EXIT_NUMERIC, EXIT_OK, OUTPUT_ENV, main
from bresse.config import ConfigError, RunConfig, initial_state
from bresse.discretization import build_system
from bresse.model_catalog import CouplingPattern
from bresse.verify import DESK

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def config(coupling="Elastic", law=None, N=8, T=0.2, dt=1e-3, **extra):
    data = {
        "model": {"coupling": coupling, "coefficients": {"reduced": DESK.as_dict()}},
        "grid": {"L": 1.0, "N": N},
        "integrator": {"dt": dt, "T": T},
        "initial": {"type": "sine", "modes": [{"field": "phi", "mode": 1, "amplitude": 1.0}]},
    }
    if law is not None:
        data["model"]["law"] = law
    data.update(extra)
    return data


@pytest.fixture
def outdir(tmp_path, monkeypatch):
    out = tmp_path / "out"
    monkeypatch.setenv(OUTPUT_ENV, str(out))
    return out


def write(tmp_path, data, name="run.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data) if isinstance(data, dict) else data)
    return str(path)


def energy_csv(out):
    return np.genfromtxt(out / "energy.csv", delimiter=",", names=True)


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------


def test_simulate_elastic_conserves_energy(tmp_path, outdir):
    assert main(["simulate", write(tmp_path, config(T=1.0))]) == EXIT_OK
    E = energy_csv(outdir)["E_total"]
    assert np.max(np.abs(E - E[0])) / E[0] < 1e-10
    summary = (outdir / "summary.txt").read_text()
    for key in ("stability_number", "energy_ratio", "decay_fit", "E_initial", "E_final"):
        assert key in summary


def test_simulate_rejects_negative_relaxation_time(tmp_path, outdir, capsys):
    data = config("SingleShear", {"name": "Cattaneo", "tau": -1.0})
    assert main(["simulate", write(tmp_path, data)]) == EXIT_CONFIG
    assert "tau" in capsys.readouterr().err
    assert not outdir.exists()


def test_simulate_zero_data(tmp_path, outdir):
    data = config("Full", {"name": "Fourier"}, initial={"type": "zero"})
    assert main(["simulate", write(tmp_path, data)]) == EXIT_OK
    table = energy_csv(outdir)
    assert np.all(table["E_total"] == 0)
    assert "energy_ratio: nan" in (outdir / "summary.txt").read_text()


def test_simulate_writes_trajectory_with_stride(tmp_path, outdir):
    data = config(
        "SingleBending",
        {"name": "Cattaneo", "tau": 0.1},
        N=4,
        T=0.1,
        integrator={"dt": 1e-3, "T": 0.1, "stride": 10},
        output={"trajectory": True},
    )
    assert main(["simulate", write(tmp_path, data)]) == EXIT_OK
    lines = (outdir / "trajectory.csv").read_text().splitlines()
    header = lines[0].split(",")
    assert header[:3] == ["t", "phi[0]", "phi[1]"] and "q3[4]" in header
    assert len(lines) == 12
    table = energy_csv(outdir)
    assert len(table) == 11
    assert np.nanmax(np.abs(table["residual"])) < 1e-8


def test_simulate_reports_decay_for_dissipative_model(tmp_path, outdir):
    data = config("Full", {"name": "Fourier"}, N=8, T=20.0, dt=0.01)
    assert main(["simulate", write(tmp_path, data)]) == EXIT_OK
    summary = (outdir / "summary.txt").read_text()
    assert "decay_fit: exponential" in summary
    E = energy_csv(outdir)["E_total"]
    assert np.all(np.diff(E) <= 1e-13 * E[0])


def test_simulate_is_deterministic(tmp_path, monkeypatch):
    path = write(tmp_path, config("SingleAxial", {"name": "LordShulman", "tau": 0.2}, output={"trajectory": True}))
    blobs = []
    for run in ("a", "b"):
        monkeypatch.setenv(OUTPUT_ENV, str(tmp_path / run))
        assert main(["simulate", path]) == EXIT_OK
        blobs.append([(tmp_path / run / f).read_bytes() for f in ("energy.csv", "trajectory.csv", "summary.txt")])
    assert blobs[0] == blobs[1]


def test_output_directory_from_config(tmp_path, monkeypatch):
    monkeypatch.delenv(OUTPUT_ENV, raising=False)
    target = tmp_path / "from_config"
    data = config(output={"directory": str(target)})
    assert main(["simulate", write(tmp_path, data)]) == EXIT_OK
    assert (target / "energy.csv").exists()


def test_environment_overrides_output_directory(tmp_path, outdir):
    data = config(output={"directory": str(tmp_path / "ignored")})
    assert main(["simulate", write(tmp_path, data)]) == EXIT_OK
    assert (outdir / "energy.csv").exists()
    assert not (tmp_path / "ignored").exists()


@pytest.mark.parametrize(
    "mutate,needle",
    [
        (lambda d: d["model"].update(extra=1), "extra"),
        (lambda d: d["model"]["coefficients"].update(physical={}), "coefficients"),
        (lambda d: d["grid"].update(N=1), "grid"),
        (lambda d: d["integrator"].update(dt=-0.1), "dt"),
        (lambda d: d["integrator"].update(scheme="RK4"), "scheme"),
        (lambda d: d["model"]["coefficients"]["reduced"].update(k=-1.0), "k"),
        (lambda d: d["model"].update(coupling="Triple"), "coupling"),
        (lambda d: d["initial"]["modes"].append({"field": "theta9", "mode": 1, "amplitude": 1.0}), "theta9"),
        (lambda d: d.pop("integrator"), "integrator"),
        (lambda d: d["model"]["coefficients"]["reduced"].pop("gamma3"), "gamma3"),
        (lambda d: d["model"].update(law={"name": "Cattaneo", "tau": "fast"}), "tau"),
    ],
)
def test_simulate_config_errors_name_the_field(tmp_path, outdir, capsys, mutate, needle):
    data = config()
    mutate(data)
    assert main(["simulate", write(tmp_path, data)]) == EXIT_CONFIG
    assert needle in capsys.readouterr().err


def test_law_missing_parameter(tmp_path, outdir, capsys):
    data = config("SingleShear", {"name": "TzouDPL", "tau_q": 0.1})
    assert main(["simulate", write(tmp_path, data)]) == EXIT_CONFIG
    assert "tau_theta" in capsys.readouterr().err


def test_null_law_is_accepted_for_elastic(tmp_path, outdir):
    data = config()
    data["model"]["law"] = None
    assert main(["simulate", write(tmp_path, data)]) == EXIT_OK


def test_malformed_json(tmp_path, outdir):
    assert main(["simulate", write(tmp_path, "{not json")]) == EXIT_CONFIG
    assert main(["spectrum", write(tmp_path, "[1, 2")]) == EXIT_CONFIG
    assert main(["simulate", str(tmp_path / "missing.json")]) == EXIT_CONFIG


def test_physical_coefficients(tmp_path, outdir):
    assert main(["simulate", str(CONFIGS / "bending_memory_physical.json")]) == EXIT_OK
    assert "SingleBending" in (outdir / "summary.txt").read_text()


# ---------------------------------------------------------------------------
# spectrum
# ---------------------------------------------------------------------------


def _summary_value(out, key):
    for line in (out / "summary.txt").read_text().splitlines():
        if line.startswith(key + ":"):
            return float(line.split(":", 1)[1])
    raise KeyError(key)


def test_spectrum_elastic(tmp_path, outdir):
    assert main(["spectrum", write(tmp_path, config(N=12))]) == EXIT_OK
    abscissa = _summary_value(outdir, "spectral_abscissa")
    norm = _summary_value(outdir, "operator_norm")
    assert abs(abscissa) <= 1e-9 * norm
    eig = np.loadtxt(outdir / "spectrum.csv", delimiter=",", skiprows=1)
    assert eig.shape == (72, 2)
    assert "stability_number: chi1=" in (outdir / "summary.txt").read_text()


def test_spectrum_full_fourier(tmp_path, outdir):
    assert main(["spectrum", write(tmp_path, config("Full", {"name": "Fourier"}, N=12))]) == EXIT_OK
    assert _summary_value(outdir, "spectral_abscissa") < 0


def test_spectrum_over_dense_cap(tmp_path, outdir, capsys):
    assert main(["spectrum", write(tmp_path, config("Full", {"name": "Fourier"}, N=500))]) == EXIT_NUMERIC
    assert "reduce grid.N" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# catalog and verify
# ---------------------------------------------------------------------------


def test_catalog(capsys):
    assert main(["catalog"]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[-1] == "57 entries"
    assert len(lines) == 58
    assert any(line.startswith("(Full, Fourier): fields φ,ψ,w,θ1,θ2,θ3") for line in lines)
    assert any(line.startswith("(SingleBending, TypeIIIMemory)") for line in lines)


def test_verify_unknown_suite(capsys):
    assert main(["verify", "bogus"]) == EXIT_CONFIG
    assert "bogus" in capsys.readouterr().err


def test_verify_limits(capsys):
    assert main(["verify", "limits"]) == EXIT_OK
    out = capsys.readouterr().out
    assert out.count("PASS") == 3 and "3/3 checks passed" in out


def test_verify_failure_exit_code(monkeypatch, capsys):
    from bresse import cli
    from bresse.verify import Check

    monkeypatch.setitem(cli.SUITES, "limits", lambda: [Check("forced", 2.0, 1.0, False)])
    monkeypatch.setattr(cli, "run_suite", lambda name: cli.SUITES[name]())
    assert main(["verify", "limits"]) == EXIT_NUMERIC
    assert "FAIL" in capsys.readouterr().out


def test_usage_errors():
    assert main([]) == EXIT_CONFIG
    assert main(["frobnicate"]) == EXIT_CONFIG


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "bresse", "catalog"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.rstrip().endswith("57 entries")


# ---------------------------------------------------------------------------
# configuration values
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("path", sorted(CONFIGS.glob("*.json")), ids=lambda p: p.name)
def test_shipped_configs_round_trip(path):
    cfg = RunConfig.load(path)
    assert RunConfig.from_dict(json.loads(cfg.dumps())) == cfg
    cfg.build_spec()


laws = st.one_of(
    st.none(),
    st.builds(lambda tau: {"name": "Cattaneo", "tau": tau}, st.floats(1e-3, 10)),
    st.builds(
        lambda a, b: {"name": "GurtinPipkin", "kernel": [[a, b]]}, st.floats(0.1, 10), st.floats(0.1, 10)
    ),
    st.builds(lambda beta, varpi: {"name": "GreenNaghdiIII", "beta": beta, "varpi": varpi},
              st.floats(0.1, 5), st.floats(0, 5)),
)


@given(
    coupling=st.sampled_from([p.name for p in CouplingPattern]),
    law=laws,
    N=st.integers(2, 64),
    L=st.floats(0.1, 10),
    dt=st.floats(1e-4, 1e-2),
    stride=st.integers(1, 20),
    scheme=st.sampled_from(["ImplicitMidpoint", "BackwardEuler"]),
    amplitude=st.floats(-5, 5),
)
def test_config_round_trip(coupling, law, N, L, dt, stride, scheme, amplitude):
    data = config(coupling, law, N=N, T=1.0, dt=dt)
    data["grid"]["L"] = L
    data["integrator"].update(stride=stride, scheme=scheme)
    data["initial"]["modes"][0]["amplitude"] = amplitude
    cfg = RunConfig.from_dict(data)
    again = RunConfig.from_dict(json.loads(cfg.dumps()))
    assert again == cfg
    assert again.dumps() == cfg.dumps()


def test_initial_state_profile():
    cfg = RunConfig.from_dict(config(N=4))
    sys_ = build_system(cfg.build_spec(), cfg.N)
    u = initial_state(cfg, sys_)
    np.testing.assert_allclose(sys_.get(u, "phi"), np.sin(np.pi * sys_.grid.nodes))
    assert not np.any(sys_.get(u, "psi"))


def test_config_error_is_value_error():
    with pytest.raises(ValueError):
        RunConfig.from_dict({})
    assert issubclass(ConfigError, ValueError)
