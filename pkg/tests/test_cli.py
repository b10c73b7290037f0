"""Exit codes, report text, SVG and CSV artifacts of the command-line front end."""

import math
import xml.etree.ElementTree as ET

import pytest

from hyperband.cli import _cayley, _disk_edge_path, main, parse_config_file
from hyperband.halfplane import HPoint
from hyperband.tiling import TilingParams, enumerate_tiles, make_generators


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# ---------------------------------------------------------------- verify


def test_verify_passes_at_quarter_flux(capsys):
    code, out, _ = run(capsys, "verify", "--g", "2", "--B", "1/4")
    assert code == 0
    lines = [line for line in out.splitlines() if line]
    assert len(lines) == 9
    assert all(line.startswith("PASS") for line in lines)
    flux_line = next(line for line in lines if "flux relation" in line)
    assert "phase -1" in flux_line


def test_verify_zero_field_phase_is_one(capsys):
    code, out, _ = run(capsys, "verify", "--g", "2", "--B", "0")
    assert code == 0
    flux_line = next(line for line in out.splitlines() if "flux relation" in line)
    assert "phase 1" in flux_line


def test_verify_accepts_bare_real_field(capsys):
    code, out, _ = run(capsys, "verify", "--B", "0.7")
    assert code == 0


def test_verify_rejects_low_genus(capsys):
    code, _, err = run(capsys, "verify", "--g", "1")
    assert code == 2
    assert "genus" in err


def test_verify_tolerance_override_can_force_failure(capsys):
    code, out, _ = run(capsys, "verify", "--tol", "relation=1e-16")
    assert code == 1
    assert any(line.startswith("FAIL fuchsian relation") for line in out.splitlines())


def test_verify_rejects_unknown_tolerance(capsys):
    code, _, err = run(capsys, "verify", "--tol", "nonsense=1")
    assert code == 2
    assert "nonsense" in err


def test_missing_subcommand_is_usage_error(capsys):
    with pytest.raises(SystemExit) as info:
        main([])
    assert info.value.code == 2


# ---------------------------------------------------------------- tile


def test_cayley_sends_domain_center_to_origin():
    assert abs(_cayley(HPoint(0.0, 1.0))) < 1e-15


def test_diameter_edges_fall_back_to_lines():
    w = 0.3 + 0.4j
    assert _disk_edge_path(w, -w).startswith("L ")
    assert _disk_edge_path(0.5 + 0j, -0.2 + 0j).startswith("L ")


def test_generic_edge_is_an_arc():
    seg = _disk_edge_path(0.5 + 0j, 0.0 + 0.5j)
    assert seg.startswith("A ")
    radius = float(seg.split()[1])
    # circle through (.5,0) and (0,.5) orthogonal to the unit circle: c=(1.25,1.25)
    assert abs(radius - math.sqrt(2 * 1.25**2 - 1.0)) < 1e-6


def test_tile_depth_zero_single_octagon(tmp_path, capsys):
    out = tmp_path / "patch.svg"
    code, text, _ = run(capsys, "tile", "--depth", "0", "--out", str(out))
    assert code == 0 and "1 tiles" in text
    root = ET.fromstring(out.read_text())
    assert root.get("viewBox") == "-1.05 -1.05 2.1 2.1"
    ns = "{http://www.w3.org/2000/svg}"
    paths = root.findall(f"{ns}path")
    assert len(paths) == 1
    assert root.find(f"{ns}circle").get("r") == "1"
    d = paths[0].get("d")
    assert d.startswith("M ") and d.endswith("Z")
    assert d.count("A ") == 8  # all eight octagon edges render as arcs


def test_tile_count_matches_enumeration(tmp_path, capsys):
    out = tmp_path / "patch.svg"
    code, text, _ = run(capsys, "tile", "--g", "2", "--depth", "2", "--out", str(out))
    assert code == 0
    expected = len(enumerate_tiles(make_generators(TilingParams(2)), 2))
    root = ET.fromstring(out.read_text())
    assert len(root.findall("{http://www.w3.org/2000/svg}path")) == expected


def test_tile_output_is_byte_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.svg", tmp_path / "b.svg"
    run(capsys, "tile", "--depth", "1", "--out", str(a))
    run(capsys, "tile", "--depth", "1", "--out", str(b))
    data = a.read_bytes()
    assert data == b.read_bytes()
    assert b"\r" not in data


def test_tile_rejects_bad_depth_and_path(tmp_path, capsys):
    code, _, err = run(capsys, "tile", "--depth", "-1")
    assert code == 2
    code, _, err = run(capsys, "tile", "--depth", "9")  # enumeration guard
    assert code == 2 and "depth" in err
    code, _, err = run(capsys, "tile", "--out", str(tmp_path / "missing" / "x.svg"))
    assert code == 2


# ---------------------------------------------------------------- spectrum


def test_spectrum_half_flux_single_eigenvalue(capsys):
    code, out, _ = run(capsys, "spectrum", "--B", "1/2", "--model", "reduced", "--m", "0", "--k", "0,0,0,0")
    assert code == 0
    assert len(out.split()) == 1
    float(out)  # parses as a number


def test_spectrum_block_dimension_and_order(capsys):
    code, out, _ = run(capsys, "spectrum", "--B", "1/6", "--model", "block-aniso")
    assert code == 0
    values = [float(line) for line in out.split()]
    assert len(values) == 24
    assert values == sorted(values)


def test_spectrum_rejects_bad_flux_and_model(capsys):
    assert run(capsys, "spectrum", "--B", "0.25")[0] == 2
    assert run(capsys, "spectrum", "--B", "1/0")[0] == 2
    assert run(capsys, "spectrum", "--B", "1/6", "--model", "nonsense")[0] == 2
    assert run(capsys, "spectrum", "--B", "1/6", "--model", "block-iso", "--m", "2")[0] == 2
    assert run(capsys, "spectrum", "--k", "1,2,3")[0] == 2


# ---------------------------------------------------------------- butterfly


def test_butterfly_csv_contract(tmp_path, capsys):
    out = tmp_path / "sweep.csv"
    code, text, _ = run(capsys, "butterfly", "--q-max", "2", "--k-samples", "1", "--out", str(out))
    assert code == 0
    assert "3 samples, 5 rows" in text
    lines = out.read_text().splitlines()
    assert lines[0] == "phi,energy"
    rows = [(float(a), float(b)) for a, b in (line.split(",") for line in lines[1:])]
    assert len(rows) == 5  # sum of q over coprime pairs with q_max=2
    assert rows == sorted(rows)
    phis = sorted({phi for phi, _ in rows})
    assert max(abs(p - w) for p, w in zip(phis, [math.pi, 2 * math.pi, 3 * math.pi])) < 1e-9


def test_butterfly_is_byte_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    run(capsys, "butterfly", "--q-max", "3", "--k-samples", "2", "--seed", "5", "--out", str(a))
    run(capsys, "butterfly", "--q-max", "3", "--k-samples", "2", "--seed", "5", "--out", str(b))
    data = a.read_bytes()
    assert data == b.read_bytes()
    assert b"\r" not in data


def test_butterfly_rejects_small_q_max_and_bad_path(tmp_path, capsys):
    assert run(capsys, "butterfly", "--q-max", "1")[0] == 2
    assert run(capsys, "butterfly", "--out", str(tmp_path / "no" / "x.csv"))[0] == 2


# ---------------------------------------------------------------- config file


def test_config_file_supplies_defaults_and_flags_override(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# sweep setup\nq_max = 2\nk_samples = 1\nout = {}\n".format(tmp_path / "c.csv"))
    code, text, _ = run(capsys, "butterfly", "--config", str(cfg))
    assert code == 0 and (tmp_path / "c.csv").exists()
    override = tmp_path / "d.csv"
    code, text, _ = run(capsys, "butterfly", "--config", str(cfg), "--out", str(override))
    assert code == 0 and override.exists()


def test_config_file_rejects_unknown_key_and_bad_syntax(tmp_path, capsys):
    bad = tmp_path / "bad.cfg"
    bad.write_text("bogus = 1\n")
    assert run(capsys, "butterfly", "--config", str(bad))[0] == 2
    bad.write_text("just words\n")
    assert run(capsys, "butterfly", "--config", str(bad))[0] == 2
    assert run(capsys, "butterfly", "--config", str(tmp_path / "absent.cfg"))[0] == 2


def test_config_parser_strips_comments_and_blanks(tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("\n# top comment\ng = 3  # trailing comment\n\ndepth=1\n")
    assert parse_config_file(str(cfg)) == {"g": "3", "depth": "1"}
