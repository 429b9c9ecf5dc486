import struct

import numpy as np
import pytest

from zakotfs import cli
from zakotfs import simulate as sim
from zakotfs.config import PRESETS, SCHEMA_ID, load_config, load_preset, parse_config
from zakotfs.errors import InvalidConfig
from zakotfs.iqfile import read_iq, write_iq


def _doc(**over):
    doc = {
        "schema": SCHEMA_ID, "experiment": "ber", "frames": 2, "seed": 1,
        "grid": {"M": 17, "N": 19, "nu_p": 30000.0},
        "gdaft": {"A": 3, "B": 5, "C": 7},
        "pilot": {"k": 8, "l": 9, "modes": ["perfect", "equal"]},
        "snr": {"points": [10.0]},
    }
    doc.update(over)
    return doc


def test_waveform_spread(tmp_path, capsys):
    out = tmp_path / "w.iq"
    assert cli.main(["waveform", "--basis", "spread", "--k0", "2", "--l0", "3", "--out", str(out)]) == 0
    assert "PAPR 6.6" in capsys.readouterr().out
    header, x = read_iq(out)
    assert x.size == 323
    assert np.max(np.abs(np.abs(x) - 1 / np.sqrt(323))) < 1e-12
    assert header["basis"] == "spread" and (header["A"], header["B"], header["C"]) == ("3", "5", "7")
    assert (header["M"], header["N"]) == ("17", "19")


def test_waveform_pulsone(tmp_path):
    out = tmp_path / "p.iq"
    assert cli.main(["waveform", "--basis", "pulsone", "--out", str(out)]) == 0
    _, x = read_iq(out)
    assert np.count_nonzero(np.abs(x) > 1e-15) == 19


def test_waveform_rejects_non_coprime(capsys):
    assert cli.main(["waveform", "--A", "17"]) == 2
    err = capsys.readouterr().err
    assert "co-prime" in err and "17" in err


def test_iq_layout(tmp_path):
    p = tmp_path / "x.iq"
    write_iq(p, np.array([1 + 2j, -3.5 + 0.25j]), {"M": 1})
    raw = p.read_bytes()
    head, body = raw.split(b"\n", 1)
    assert head.startswith(b"# ")
    assert struct.unpack("<4d", body) == (1.0, 2.0, -3.5, 0.25)
    with pytest.raises(InvalidConfig):
        write_iq(p, [1], {"bad key": 1})


def test_check_and_search(capsys, tmp_path):
    assert cli.main(["check", "--A", "3", "--B", "5", "--C", "7"]) == 0
    assert capsys.readouterr().out.startswith("PASS")
    assert cli.main(["check", "--A", "2", "--B", "5", "--C", "7"]) == 1
    out = capsys.readouterr().out
    assert out.startswith("FAIL") and "translate" in out
    csvp = tmp_path / "s.csv"
    assert cli.main(["search", "--bounds", "3:3,1:10,1:10", "--out", str(csvp)]) == 0
    lines = csvp.read_text().splitlines()
    assert lines[0] == "A,B,C" and "3,5,7" in lines


def test_simulate_is_byte_identical(tmp_path):
    a, b, c = (tmp_path / f"{n}.csv" for n in "abc")
    args = ["simulate", "--config", "fig4-ber", "--frames", "2"]
    assert cli.main(args + ["--out", str(a)]) == 0
    assert cli.main(args + ["--out", str(b)]) == 0
    assert cli.main(args + ["--out", str(c), "--workers", "2"]) == 0
    assert a.read_bytes() == b.read_bytes() == c.read_bytes()
    lines = a.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "metric,scenario,x,y,frames,seed"
    assert lines[1].startswith("ber,fig4-ber/pulsone/perfect-csi,0.0,")
    assert lines[1].endswith(",2,4")


def test_seed_override_changes_output(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    cli.main(["simulate", "--config", "fig3-nmse", "--frames", "1", "--out", str(a)])
    cli.main(["simulate", "--config", "fig3-nmse", "--frames", "1", "--seed", "99", "--out", str(b)])
    assert a.read_bytes() != b.read_bytes()
    assert b.read_text().splitlines()[1].endswith(",1,99")


def test_interrupt_flushes_partial_results(tmp_path, monkeypatch):
    real = sim.map_frames
    calls = []

    def flaky(fn, frames, workers=1, executor=None):
        calls.append(1)
        if len(calls) > 1:
            raise KeyboardInterrupt
        return real(fn, frames, workers, executor)

    monkeypatch.setattr(sim, "map_frames", flaky)
    monkeypatch.setattr(cli, "CHUNK_FRAMES", 1)
    out = tmp_path / "p.csv"
    assert cli.main(["simulate", "--config", "fig5-comparison", "--frames", "5", "--out", str(out)]) == 1
    rows = out.read_text().splitlines()[1:]
    # chunks hold at least four frames, so exactly one chunk completed
    assert rows and all(r.split(",")[4] == "4" for r in rows)


def test_papr_ccdf_command(tmp_path):
    out = tmp_path / "c.csv"
    assert cli.main(["papr-ccdf", "--frames", "20", "--out", str(out)]) == 0
    rows = [r.split(",") for r in out.read_text().splitlines()[1:]]
    assert {r[0] for r in rows} == {"papr_median_db", "papr_ccdf"}
    probs = [float(r[3]) for r in rows if r[0] == "papr_ccdf" and r[1].endswith("/spread")]
    assert probs == sorted(probs, reverse=True)


def test_presets_load():
    for name in PRESETS:
        cfg = load_preset(name)
        assert cfg.name == name
    assert load_preset("fig6-wideband").grid.M == 83


def test_config_validation_messages(tmp_path):
    with pytest.raises(InvalidConfig, match="schema"):
        parse_config(_doc(schema="v0"))
    with pytest.raises(InvalidConfig, match="co-prime"):
        parse_config(_doc(gdaft={"A": 17, "B": 5, "C": 7}))
    with pytest.raises(InvalidConfig, match="crystallize"):
        parse_config(_doc(gdaft={"A": 2, "B": 5, "C": 7}))
    # the same parameters are fine with perfect CSI, where no estimate is needed
    parse_config(_doc(gdaft={"A": 2, "B": 5, "C": 7}, pilot={"modes": ["perfect"]}))
    with pytest.raises(InvalidConfig, match="delay spread"):
        parse_config(_doc(channel={"profile": "custom",
                                   "paths": [{"gain_re": 1.0, "delay_s": 5e-5, "doppler_hz": 0.0}]}))
    with pytest.raises(InvalidConfig, match="pilot"):
        parse_config(_doc(pilot={"k": 17, "l": 0}))
    with pytest.raises(InvalidConfig, match="support"):
        parse_config(_doc(support={"k_min": 0, "k_max": 20, "l_min": 0, "l_max": 1}))
    with pytest.raises(InvalidConfig, match="GDAFT|gdaft"):
        parse_config(_doc(gdaft={}))
    with pytest.raises(InvalidConfig, match="constellation"):
        parse_config(_doc(constellation="16qam"))
    with pytest.raises(InvalidConfig, match="not found"):
        load_config(tmp_path / "missing.toml")


def test_custom_channel_profile(tmp_path):
    p = tmp_path / "c.toml"
    p.write_text(f'''schema = "{SCHEMA_ID}"
experiment = "ber"
bases = ["pulsone"]
frames = 1
[grid]
M = 17
N = 19
nu_p = 30000.0
[channel]
profile = "custom"
paths = [{{gain_re = 0.8, gain_im = 0.6, delay_s = 3.9215686274509804e-06, doppler_hz = 0.0}}]
[snr]
start = 0.0
stop = 4.0
step = 2.0
''')
    cfg = load_config(p)
    assert cfg.snrs == (0.0, 2.0, 4.0)
    assert cfg.paths[0][0] == 0.8 + 0.6j
    assert cfg.link_setup().paths == cfg.paths
