"""Command-line front end.

Subcommands: `verify` runs the numerical identity suite, `tile` renders a
Poincare-disk patch of the {4g,4g} tiling to SVG, `spectrum` prints the
eigenvalues of one lattice Hamiltonian, `butterfly` sweeps rational flux and
writes a phi/energy CSV. Exit codes: 0 success, 1 verification failure,
2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import cmath
import math
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np

from .halfplane import HPoint, moebius_act
from .magnetic import (
    DiffOpId,
    FluxParam,
    commutator_residual,
    covering_degree_check,
    flux_relation_phase,
    hamiltonian_commutation_residual,
    hamiltonian_forms_residual,
)
from .spectrum import (
    BlochMomentum,
    BlockAnisotropic,
    BlockIsotropic,
    HamiltonianModel,
    ReducedHarper,
    assemble,
    assemble_block,
    assemble_reduced,
    butterfly_sweep,
    eigenvalues,
)
from .tiling import (
    FundamentalDomain,
    TilingParams,
    edge_pairing_defect,
    enumerate_tiles,
    make_fundamental_domain,
    make_generators,
    relation_defect,
)

_TWO_PI = 2.0 * math.pi

# straight-segment fallback for near-diameter geodesics
_ARC_RADIUS_LIMIT = 1e4

_VERIFY_TOLERANCES = {
    "relation": 1e-9,
    "pairing": 1e-9,
    "covering": 1e-8,
    "flux": 1e-7,
    "algebra": 1e-8,
    "hamiltonian": 1e-8,
    "forms": 1e-8,
    "hermiticity": 1e-12,
    "sector": 1e-7,
}


class UsageError(Exception):
    """Bad flags, config file, or preconditions; maps to exit code 2."""


# ---------------------------------------------------------------- config plumbing

_CONFIG_KEYS = {"g", "B", "model", "m", "k", "depth", "q_max", "k_samples", "seed", "out"}


def parse_config_file(path: str) -> dict[str, str]:
    """Line-oriented key=value pairs; blank lines and # comments ignored."""
    values: dict[str, str] = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from exc
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value, got {line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _CONFIG_KEYS:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = value
    return values


def _resolve(args: argparse.Namespace, config: dict[str, str], key: str, default):
    """Flag beats config beats default; config values arrive as text."""
    flag = getattr(args, key, None)
    if flag is not None:
        return flag
    if key in config:
        return config[key]
    return default


def _as_int(value, what: str) -> int:
    try:
        return int(str(value), 10)
    except ValueError as exc:
        raise UsageError(f"{what} must be an integer, got {value!r}") from exc


def parse_flux(text: str, allow_real: bool) -> Union[Fraction, float]:
    """`p/q` is exact; a bare real is admitted only where rationality is not needed."""
    text = str(text).strip()
    if "/" in text:
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise UsageError(f"bad rational flux {text!r}: {exc}") from exc
    try:
        value = float(text)
    except ValueError as exc:
        raise UsageError(f"bad flux {text!r}") from exc
    if not math.isfinite(value):
        raise UsageError(f"flux must be finite, got {text!r}")
    if not allow_real:
        raise UsageError(f"this command needs an exact rational flux like 1/6, got {text!r}")
    return value


def parse_model(name: str, m) -> HamiltonianModel:
    name = str(name).strip()
    if name == "reduced":
        return ReducedHarper(0 if m is None else _as_int(m, "sector index"))
    if m is not None:
        raise UsageError(f"--m selects a rotation sector of the reduced model, not {name!r}")
    if name == "block-aniso":
        return BlockAnisotropic()
    if name == "block-iso":
        return BlockIsotropic()
    raise UsageError(f"unknown model {name!r}; choose reduced, block-aniso, or block-iso")


def parse_momentum(text: str) -> BlochMomentum:
    parts = str(text).split(",")
    if len(parts) != 4:
        raise UsageError(f"momentum needs four comma-separated reals, got {text!r}")
    try:
        k1, k2, k3, k4 = (float(p) for p in parts)
    except ValueError as exc:
        raise UsageError(f"bad momentum {text!r}") from exc
    return BlochMomentum(k1, k2, k3, k4)


def _tolerances(overrides: Optional[Sequence[str]]) -> dict[str, float]:
    tols = dict(_VERIFY_TOLERANCES)
    for item in overrides or ():
        if "=" not in item:
            raise UsageError(f"tolerance override needs name=value, got {item!r}")
        name, value = (part.strip() for part in item.split("=", 1))
        if name not in tols:
            raise UsageError(f"unknown tolerance {name!r}; known: {', '.join(sorted(tols))}")
        try:
            tols[name] = float(value)
        except ValueError as exc:
            raise UsageError(f"bad tolerance value {value!r}") from exc
    return tols


@dataclass
class VerifyReport:
    lines: list[str] = field(default_factory=list)
    failed: bool = False

    def add(self, name: str, defect: float, tol: float, extra: str = "") -> None:
        ok = defect < tol
        self.failed = self.failed or not ok
        status = "PASS" if ok else "FAIL"
        self.lines.append(f"{status} {name:<24s} defect {defect:.3e}  tol {tol:.0e}{extra}")


# ---------------------------------------------------------------- verify


def _random_points(rng: np.random.Generator, count: int) -> list[HPoint]:
    return [
        HPoint(float(rng.uniform(-2.0, 2.0)), float(rng.uniform(0.2, 3.0)))
        for _ in range(count)
    ]


def cmd_verify(args: argparse.Namespace, config: dict[str, str]) -> int:
    genus = _as_int(_resolve(args, config, "g", 2), "genus")
    if genus < 2:
        raise UsageError(f"genus must be >= 2, got {genus}")
    flux = parse_flux(_resolve(args, config, "B", "1/4"), allow_real=True)
    seed = _as_int(_resolve(args, config, "seed", 0), "seed")
    if seed < 0:
        raise UsageError(f"seed must be >= 0, got {seed}")
    tols = _tolerances(getattr(args, "tol", None))

    B = float(flux)
    params = TilingParams(genus)
    gens = make_generators(params)
    rng = np.random.default_rng(seed)
    report = VerifyReport()

    report.add("fuchsian relation", relation_defect(gens), tols["relation"])
    report.add("edge pairing", edge_pairing_defect(gens, make_fundamental_domain(params)), tols["pairing"])

    covering = max(
        abs(covering_degree_check(q) - cmath.exp(2j * math.pi / q)) for q in range(1, 9)
    )
    report.add("covering degree", covering, tols["covering"])

    expected_phase = cmath.exp(1j * 4.0 * (genus - 1) * math.pi * B)
    phase = expected_phase
    try:
        worst = 0.0
        for z in _random_points(rng, 5):
            phase = flux_relation_phase(params, B, z)
            worst = max(worst, abs(phase - expected_phase))
        extra = f"  phase {phase.real:.6g}{phase.imag:+.6g}j"
        report.add("flux relation", worst, tols["flux"], extra)
    except RuntimeError as exc:
        report.add("flux relation", math.inf, tols["flux"], f"  ({exc})")

    field_triples = [
        (DiffOpId.U_B, DiffOpId.T_B, {DiffOpId.T_B: -2.0}),
        (DiffOpId.S_B, DiffOpId.T_B, {DiffOpId.U_B: -1.0}),
        (DiffOpId.U_B, DiffOpId.S_B, {DiffOpId.T_B: -4.0, DiffOpId.S_B: 2.0}),
        (DiffOpId.U_check, DiffOpId.T_check, {DiffOpId.T_check: -2.0}),
        (DiffOpId.S_check, DiffOpId.T_check, {DiffOpId.U_check: -1.0}),
        (DiffOpId.U_check, DiffOpId.S_check, {DiffOpId.T_check: -4.0, DiffOpId.S_check: 2.0}),
    ]
    algebra_points = _random_points(rng, 5)
    algebra = max(
        commutator_residual(op1, op2, expected, z, B)
        for op1, op2, expected in field_triples
        for z in algebra_points
    )
    report.add("operator commutators", algebra, tols["algebra"])

    lemma = max(
        hamiltonian_commutation_residual(op, z, B)
        for op in (DiffOpId.S_B, DiffOpId.T_B, DiffOpId.U_B)
        for z in algebra_points
    )
    report.add("hamiltonian symmetry", lemma, tols["hamiltonian"])
    forms = max(hamiltonian_forms_residual(z, B) for z in algebra_points)
    report.add("hamiltonian forms", forms, tols["forms"])

    # Lattice checks are genus-2 structures; a bare-real B has no flux pair,
    # so they fall back to a representative rational.
    pair = FluxParam.from_field(flux) if isinstance(flux, Fraction) else FluxParam(1, 3)
    momenta = [BlochMomentum(*rng.uniform(0.0, _TWO_PI, size=4)) for _ in range(2)]
    hermiticity = 0.0
    sector = 0.0
    for k in momenta:
        matrices = [
            assemble_reduced(pair.p, pair.q, k, 0),
            assemble_reduced(pair.p, pair.q, k, 5),
            assemble_block(BlockAnisotropic(), pair.p, pair.q, k),
            assemble_block(BlockIsotropic(), pair.p, pair.q, k),
        ]
        for h in matrices:
            entries = np.asarray(h.entries)
            hermiticity = max(hermiticity, float(np.abs(entries - entries.conj().T).max()))
        union = np.sort(
            np.concatenate(
                [eigenvalues(assemble_reduced(pair.p, pair.q, k, m)) for m in range(8)]
            )
        )
        block = np.asarray(eigenvalues(assemble_block(BlockAnisotropic(), pair.p, pair.q, k)))
        sector = max(sector, float(np.abs(union - block).max()))
    report.add("lattice hermiticity", hermiticity, tols["hermiticity"], f"  (p={pair.p}, q={pair.q})")
    report.add("rotation sectors", sector, tols["sector"], f"  (p={pair.p}, q={pair.q})")

    for line in report.lines:
        print(line)
    return 1 if report.failed else 0


# ---------------------------------------------------------------- tile


def _cayley(z: HPoint) -> complex:
    w = (z.as_complex() - 1j) / (z.as_complex() + 1j)
    return w


def _disk_edge_path(w1: complex, w2: complex) -> str:
    """SVG segment from w1 to w2 along the geodesic circle orthogonal to |w|=1.

    The center c of that circle satisfies 2 Re(w) cx + 2 Im(w) cy = |w|^2 + 1
    at both endpoints; a vanishing determinant means the geodesic is a
    diameter, drawn straight.
    """
    a11, a12, b1 = 2.0 * w1.real, 2.0 * w1.imag, abs(w1) ** 2 + 1.0
    a21, a22, b2 = 2.0 * w2.real, 2.0 * w2.imag, abs(w2) ** 2 + 1.0
    det = a11 * a22 - a12 * a21
    line = f"L {w2.real:.6f} {w2.imag:.6f}"
    if abs(det) < 1e-9:
        return line
    cx = (b1 * a22 - b2 * a12) / det
    cy = (a11 * b2 - a21 * b1) / det
    r_sq = cx * cx + cy * cy - 1.0
    if r_sq <= 0.0:
        return line
    radius = math.sqrt(r_sq)
    if radius > _ARC_RADIUS_LIMIT:
        return line
    theta1 = math.atan2(w1.imag - cy, w1.real - cx)
    theta2 = math.atan2(w2.imag - cy, w2.real - cx)
    delta = (theta2 - theta1) % _TWO_PI
    if delta > math.pi:
        delta -= _TWO_PI
    sweep = 1 if delta > 0.0 else 0
    return f"A {radius:.6f} {radius:.6f} 0 0 {sweep} {w2.real:.6f} {w2.imag:.6f}"


def _tile_path(dom: FundamentalDomain, tile) -> str:
    corners = [_cayley(moebius_act(tile, v)) for v in dom.vertices]
    start = corners[dom.edges[0][0]]
    parts = [f"M {start.real:.6f} {start.imag:.6f}"]
    for i, j in dom.edges:
        parts.append(_disk_edge_path(corners[i], corners[j]))
    parts.append("Z")
    return " ".join(parts)


def render_tiling_svg(params: TilingParams, depth: int) -> str:
    gens = make_generators(params)
    dom = make_fundamental_domain(params)
    tiles = enumerate_tiles(gens, depth)
    pieces = [
        '<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        'viewBox="-1.05 -1.05 2.1 2.1" width="720" height="720">',
        '<circle cx="0" cy="0" r="1" fill="none" stroke="#999999" stroke-width="0.004"/>',
    ]
    for tile in tiles:
        pieces.append(
            f'<path d="{_tile_path(dom, tile)}" fill="none" '
            'stroke="#1f3a5f" stroke-width="0.0025"/>'
        )
    pieces.append("</svg>")
    return "\n".join(pieces) + "\n"


def cmd_tile(args: argparse.Namespace, config: dict[str, str]) -> int:
    genus = _as_int(_resolve(args, config, "g", 2), "genus")
    if genus < 2:
        raise UsageError(f"genus must be >= 2, got {genus}")
    depth = _as_int(_resolve(args, config, "depth", 2), "depth")
    if depth < 0:
        raise UsageError(f"depth must be >= 0, got {depth}")
    out = str(_resolve(args, config, "out", "tiling.svg"))
    try:
        svg = render_tiling_svg(TilingParams(genus), depth)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    try:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(svg)
    except OSError as exc:
        raise UsageError(f"cannot write {out}: {exc}") from exc
    tiles = svg.count("<path")
    print(f"wrote {out}: {tiles} tiles (genus {genus}, depth {depth})")
    return 0


# ---------------------------------------------------------------- spectrum


def cmd_spectrum(args: argparse.Namespace, config: dict[str, str]) -> int:
    flux = parse_flux(_resolve(args, config, "B", "1/6"), allow_real=False)
    model = parse_model(_resolve(args, config, "model", "reduced"), _resolve(args, config, "m", None))
    k = parse_momentum(_resolve(args, config, "k", "0,0,0,0"))
    pair = FluxParam.from_field(flux)
    try:
        h = assemble(model, pair.p, pair.q, k)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    for value in eigenvalues(h):
        print(f"{value:.12g}")
    return 0


# ---------------------------------------------------------------- butterfly


def cmd_butterfly(args: argparse.Namespace, config: dict[str, str]) -> int:
    model = parse_model(_resolve(args, config, "model", "reduced"), _resolve(args, config, "m", None))
    q_max = _as_int(_resolve(args, config, "q_max", 8), "q_max")
    k_samples = _as_int(_resolve(args, config, "k_samples", 4), "k_samples")
    seed = _as_int(_resolve(args, config, "seed", 0), "seed")
    out = str(_resolve(args, config, "out", "butterfly.csv"))

    start = time.perf_counter()
    try:
        sweep = butterfly_sweep(model, q_max, k_samples, seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    rows = sorted((s.phi, e) for s in sweep for e in s.eigenvalues)
    try:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("phi,energy\n")
            for phi, energy in rows:
                fh.write(f"{phi:.10g},{energy:.12g}\n")
    except OSError as exc:
        raise UsageError(f"cannot write {out}: {exc}") from exc
    elapsed = time.perf_counter() - start
    print(f"wrote {out}: {len(sweep)} samples, {len(rows)} rows, {elapsed:.2f} s")
    return 0


# ---------------------------------------------------------------- entry point


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hyperband",
        description="Hyperbolic band theory on {4g,4g} tilings under a uniform magnetic field.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    verify = sub.add_parser("verify", help="run the numerical identity suite")
    verify.add_argument("--g", type=int, help="genus (default 2)")
    verify.add_argument("--B", help="magnetic field, rational like 1/4 or a bare real")
    verify.add_argument("--seed", type=int, help="seed for random sample points (default 0)")
    verify.add_argument(
        "--tol", action="append", metavar="NAME=VALUE", help="override one check tolerance"
    )
    verify.add_argument("--config", help="key=value config file; flags override")

    tile = sub.add_parser("tile", help="render a Poincare-disk tiling patch to SVG")
    tile.add_argument("--g", type=int, help="genus (default 2)")
    tile.add_argument("--depth", type=int, help="word length of tile orbit (default 2)")
    tile.add_argument("--out", help="output SVG path (default tiling.svg)")
    tile.add_argument("--config", help="key=value config file; flags override")

    spectrum = sub.add_parser("spectrum", help="print eigenvalues of one lattice Hamiltonian")
    spectrum.add_argument("--B", help="rational magnetic field p/(2q), e.g. 1/6")
    spectrum.add_argument("--model", help="reduced | block-aniso | block-iso (default reduced)")
    spectrum.add_argument("--m", type=int, help="rotation sector for the reduced model (default 0)")
    spectrum.add_argument("--k", help="Bloch momentum as four comma-separated reals (default 0,0,0,0)")
    spectrum.add_argument("--config", help="key=value config file; flags override")

    butterfly = sub.add_parser("butterfly", help="sweep rational flux and write phi,energy CSV")
    butterfly.add_argument("--model", help="reduced | block-aniso | block-iso (default reduced)")
    butterfly.add_argument("--m", type=int, help="rotation sector for the reduced model (default 0)")
    butterfly.add_argument("--q-max", dest="q_max", type=int, help="largest flux denominator (default 8)")
    butterfly.add_argument("--k-samples", dest="k_samples", type=int, help="momenta per flux (default 4)")
    butterfly.add_argument("--seed", type=int, help="momentum sequence offset (default 0)")
    butterfly.add_argument("--out", help="output CSV path (default butterfly.csv)")
    butterfly.add_argument("--config", help="key=value config file; flags override")

    return parser


_COMMANDS = {
    "verify": cmd_verify,
    "tile": cmd_tile,
    "spectrum": cmd_spectrum,
    "butterfly": cmd_butterfly,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = parse_config_file(args.config) if getattr(args, "config", None) else {}
        return _COMMANDS[args.command](args, config)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except RuntimeError as exc:
        print(f"verification failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
