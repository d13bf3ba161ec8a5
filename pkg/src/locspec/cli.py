"""Command-line front end: eigenvalue tables, verification reports, samplers.

Subcommands
-----------
eigvals     eigenvalue tables for a mask and a window (or state), method
            ``closed`` (quadrature formulas), ``matrix`` (dense assembly +
            diagonalization) or ``both`` (with an agreement column)
verify      double-orthogonality report for a family against a mask;
            exit code 4 when any tolerance is violated (CI gate)
sample      CSV dumps of wavepackets and phase-space fields for plotting
williamson  normal form and admissibility of a covariance matrix

Config files (TOML or JSON, auto-detected by extension) provide defaults;
explicit flags override them.  Exit codes: 0 ok, 2 bad configuration,
3 numerical tolerance failure, 4 verification failure.  Every CSV starts
with a comment line carrying the tool version and a hash of the resolved
configuration; identical configurations produce byte-identical files.
LOCSPEC_THREADS caps the number of worker threads for table generation.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from .eigenvalues import eig_mixed, eig_weighted, indices_upto
from .grids import PhaseGrid, default_grid
from .hagedorn import hermite_frame, wavepacket_eval
from .opmatrix import (assemble_localization, assemble_mixed, diagonalize,
                       verify_double_orthogonality)
from .phasespace import hagedorn_stft_closed, hagedorn_wigner_closed
from .reinhardt import (MaskSpec, PlanarMask, complement_mask, fubini_study_mask,
                        full_mask, load_mask, mask_from_shadow, shadow_of,
                        square_mask)
from .specfun import DomainError
from .symplectic import (FrameError, gaussian_admissible, load_covariance,
                         load_frame, williamson)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_TOLERANCE = 3
EXIT_VERIFY = 4


class ConfigError(Exception):
    pass


class ToleranceError(Exception):
    pass


def _load_config_file(path: str) -> dict:
    if path.endswith(".json"):
        with open(path) as fh:
            return json.load(fh)
    if path.endswith(".toml"):
        try:
            import tomllib
        except ModuleNotFoundError:
            import tomli as tomllib
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    raise ConfigError(f"config file must end in .json or .toml: {path}")


def _config_hash(payload: dict) -> str:
    # output destination does not define the computation: identical jobs
    # produce byte-identical tables wherever they are written
    canon = json.dumps({k: v for k, v in payload.items() if k != "out"},
                       sort_keys=True, default=str)
    return hashlib.sha256(canon.encode()).hexdigest()[:12]


def _comment(payload: dict) -> str:
    return f"locspec {__version__} config={_config_hash(payload)}"


def parse_mask(spec: str, d: int):
    """Mask descriptors: disc:R=.., ball:R=.., polydisc:R=a,b, pball:p=..,R=..,
    weighted:alpha=a-b,R=.., square:a=.., disc-complement:R=..,
    fubini-study, full, or a path to a mask JSON file."""
    if spec is None:
        raise ConfigError("--mask is required")
    if os.path.exists(spec) and spec.endswith(".json"):
        return load_mask(spec)
    name, _, raw = spec.partition(":")
    params = {}
    if raw:
        for item in raw.split(","):
            key, _, val = item.partition("=")
            if not val:
                raise ConfigError(f"bad mask parameter {item!r} in {spec!r}")
            params[key.strip()] = val.strip()
    try:
        if name == "disc":
            return mask_from_shadow(shadow_of("ball", R=float(params["R"]), d=1))
        if name == "ball":
            return mask_from_shadow(shadow_of("ball", R=float(params["R"]), d=d))
        if name == "polydisc":
            radii = tuple(float(v) for v in params["R"].split("/")) \
                if "/" in params.get("R", "") else tuple(
                    float(params[k]) for k in sorted(params) if k.startswith("R"))
            return mask_from_shadow(shadow_of("polydisc", radii=radii))
        if name == "pball":
            return mask_from_shadow(shadow_of("pball", p=float(params["p"]),
                                              R=float(params["R"]), d=d))
        if name == "weighted":
            alpha = tuple(int(v) for v in params["alpha"].split("-"))
            return mask_from_shadow(shadow_of("weighted", alpha=alpha,
                                              R=float(params["R"])))
        if name == "disc-complement":
            return complement_mask(shadow_of("ball", R=float(params["R"]), d=1))
        if name == "square":
            return square_mask(float(params["a"]))
        if name == "fubini-study":
            return fubini_study_mask()
        if name == "full":
            return full_mask(d=d, constant=float(params.get("c", 1.0)))
    except KeyError as exc:
        raise ConfigError(f"mask {name!r} is missing parameter {exc}") from exc
    raise ConfigError(f"unknown mask descriptor {spec!r}")


def _parse_index(text: str) -> tuple:
    try:
        return tuple(int(v) for v in text.split(","))
    except ValueError as exc:
        raise ConfigError(f"bad index {text!r}") from exc


def parse_window(spec: str | None, d: int):
    if spec is None:
        return None
    name, _, raw = spec.partition(":")
    if name == "hermite":
        k = _parse_index(raw) if raw else (0,) * d
        if len(k) == 1 and d > 1:
            k = k * d
        return ("hermite", k)
    if name == "hagedorn":
        k = _parse_index(raw) if raw else (0,) * d
        return ("hagedorn", k)
    raise ConfigError(f"unknown window descriptor {spec!r}")


def parse_state(spec: str | None):
    if spec is None:
        return None
    name, _, raw = spec.partition(":")
    if name == "parity":
        return "parity"
    if name == "thermal":
        params = dict(item.partition("=")[::2] for item in raw.split(",")) if raw else {}
        return ("thermal", float(params.get("E", 1.0)))
    if name == "gaussian":
        return ("gaussian", None)   # covariance supplied via --matrix
    raise ConfigError(f"unknown state descriptor {spec!r}")


def _threads() -> int:
    raw = os.environ.get("LOCSPEC_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _resolve(args, keys) -> dict:
    """Merge config-file values (low precedence) with explicit CLI flags."""
    base = {}
    if getattr(args, "config", None):
        base.update(_load_config_file(args.config))
    out = {}
    for key in keys:
        flag = getattr(args, key.replace("-", "_"), None)
        out[key] = flag if flag is not None else base.get(key)
    return out


def cmd_eigvals(args) -> int:
    cfg = _resolve(args, ["mask", "window", "state", "frame", "nmax", "d",
                          "method", "n_basis", "out", "tol", "matrix"])
    d = int(cfg["d"] or 1)
    nmax = int(cfg["nmax"] if cfg["nmax"] is not None else 8)
    method = cfg["method"] or "closed"
    if method not in ("closed", "matrix", "both"):
        raise ConfigError(f"--method must be closed|matrix|both, got {method!r}")
    tol = float(cfg["tol"] if cfg["tol"] is not None else 1e-5)
    frame = load_frame(cfg["frame"]) if cfg["frame"] else None
    if frame is not None:
        d = frame.d          # a frame fixes the dimension before mask parsing
    mask = parse_mask(cfg["mask"], d)
    if isinstance(mask, MaskSpec):
        d = mask.d
    window = parse_window(cfg["window"], d)
    state = parse_state(cfg["state"])
    if (window is None) == (state is None):
        raise ConfigError("provide exactly one of --window or --state")
    if window and window[0] == "hagedorn":
        if frame is None:
            raise ConfigError("hagedorn windows need --frame FILE.json")
        window = ("hagedorn", frame, window[1])
    if state == ("gaussian", None) or (isinstance(state, tuple)
                                       and state[0] == "gaussian"):
        if not cfg["matrix"]:
            raise ConfigError("gaussian states need --matrix M.json")
        state = ("gaussian", load_covariance(cfg["matrix"]).M)
    if isinstance(mask, PlanarMask) and method != "matrix":
        raise ConfigError("planar (square) masks have no closed form; "
                          "use --method matrix")
    indices = indices_upto(nmax, d)

    def closed_value(n):
        if window is not None:
            if window[0] == "hermite":
                return eig_weighted(n, window[1], mask)
            return eig_weighted(n, window[2], mask)   # frame drops out
        return eig_mixed(n, mask, state)

    closed_vals = None
    if method in ("closed", "both"):
        workers = _threads()
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                closed_vals = list(pool.map(closed_value, indices))
        else:
            closed_vals = [closed_value(n) for n in indices]
    matrix_vals = None
    if method in ("matrix", "both"):
        default_basis = min(nmax + 5, 32) if d == 1 else min(nmax + 2, 8)
        n_basis = int(cfg["n_basis"] if cfg["n_basis"] is not None
                      else default_basis)
        if window is not None:
            op = assemble_localization(mask, window, n_basis)
        else:
            op = assemble_mixed(mask, state, n_basis)
        by_idx = diagonalize(op).by_index()
        matrix_vals = [by_idx.get(n) for n in indices]

    # commas inside descriptor tags would break the CSV column layout
    win_tag = (cfg["window"] or cfg["state"] or "?").replace(",", "/")
    payload = {k: str(v) for k, v in cfg.items() if v is not None}
    lines = []
    cols = [f"n{j+1}" for j in range(d)] + ["window", "lambda", "method"]
    if method == "both":
        cols += ["lambda_matrix", "agreement"]
    lines.append(",".join(cols))
    worst = 0.0
    for i, n in enumerate(indices):
        if method == "matrix":
            lam = matrix_vals[i]
            if lam is None:
                continue
            row = [str(v) for v in n] + [win_tag, f"{lam:.17g}", "matrix"]
        else:
            lam = closed_vals[i]
            row = [str(v) for v in n] + [win_tag, f"{lam:.17g}", method]
            if method == "both":
                mv = matrix_vals[i]
                if mv is None:
                    row += ["", ""]
                else:
                    agreement = abs(mv - lam)
                    worst = max(worst, agreement)
                    row += [f"{mv:.17g}", f"{agreement:.3g}"]
        lines.append(",".join(row))
    text = f"# {_comment(payload)}\n" + "\n".join(lines) + "\n"
    if cfg["out"]:
        with open(cfg["out"], "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if method == "both" and worst > tol:
        print(f"method disagreement {worst:.3e} exceeds tolerance {tol:g}",
              file=sys.stderr)
        return EXIT_TOLERANCE
    return EXIT_OK


def cmd_verify(args) -> int:
    cfg = _resolve(args, ["mask", "window", "frame", "d", "n_basis", "tol", "out"])
    d = int(cfg["d"] or 1)
    frame = load_frame(cfg["frame"]) if cfg["frame"] else None
    if frame is not None:
        d = frame.d
    mask = parse_mask(cfg["mask"], d)
    if isinstance(mask, MaskSpec):
        d = mask.d
    window = parse_window(cfg["window"] or "hermite:0", d)
    if window[0] == "hagedorn":
        if frame is None:
            raise ConfigError("hagedorn families need --frame FILE.json")
        family = ("hagedorn", frame, window[1])
    else:
        family = window
    n_basis = int(cfg["n_basis"] if cfg["n_basis"] is not None else (10 if d == 1 else 4))
    tol = float(cfg["tol"] if cfg["tol"] is not None else 1e-6)
    report = verify_double_orthogonality(family, mask, n_basis)
    ok = report.passed(tol_plane=tol, tol_mask=tol)
    worst_pair = np.unravel_index(
        np.argmax(np.abs(report.gram_mask - np.diag(np.diag(report.gram_mask)))),
        report.gram_mask.shape)
    payload = {
        "mask": str(cfg["mask"]), "family": str(cfg["window"] or "hermite:0"),
        "n_basis": n_basis, "tolerance": tol,
        "offdiag_plane": report.offdiag_plane,
        "offdiag_mask": report.offdiag_mask,
        "worst_offdiagonal_pair": [list(report.indices[worst_pair[0]]),
                                   list(report.indices[worst_pair[1]])],
        "candidate_eigenvalues": report.diagonal_mask.tolist(),
        "passed": bool(ok),
    }
    if cfg["out"]:
        with open(cfg["out"], "w") as fh:
            json.dump(payload, fh, indent=1)
    status = "PASS" if ok else "FAIL"
    print(f"{status}: {report.summary()}")
    if not ok:
        print(f"largest mask-Gram off-diagonal at index pair "
              f"{payload['worst_offdiagonal_pair']}")
        return EXIT_VERIFY
    return EXIT_OK


def cmd_sample(args) -> int:
    cfg = _resolve(args, ["frame", "index", "what", "window_index", "grid",
                          "out", "d"])
    what = cfg["what"] or "wavepacket"
    index = _parse_index(cfg["index"]) if cfg["index"] else (0,)
    frame = load_frame(cfg["frame"]) if cfg["frame"] else hermite_frame(len(index))
    if frame.d != len(index):
        raise ConfigError(
            f"index length {len(index)} != frame dimension {frame.d}")
    d = frame.d
    if cfg["grid"]:
        L, N = cfg["grid"].split(",")
        grid = PhaseGrid(d=d, extent=float(L), points=int(N))
    else:
        grid = default_grid(d)
    if not cfg["out"]:
        raise ConfigError("--out is required for sample")
    payload = {k: str(v) for k, v in cfg.items() if v is not None}
    comment = _comment(payload)

    if what == "wavepacket":
        ax = grid.axis()
        mesh = np.stack(np.meshgrid(*([ax] * d), indexing="ij"), axis=-1)
        vals = wavepacket_eval((frame, index), mesh.reshape(-1, d))
        with open(cfg["out"], "w") as fh:
            fh.write(f"# {comment}\n")
            fh.write(",".join([f"t{j+1}" for j in range(d)] + ["re", "im", "abs"])
                     + "\n")
            flat = mesh.reshape(-1, d)
            for i in range(flat.shape[0]):
                coords = [f"{flat[i, j]:.17g}" for j in range(d)]
                v = vals[i]
                fh.write(",".join(coords + [f"{v.real:.17g}", f"{v.imag:.17g}",
                                            f"{abs(v):.17g}"]) + "\n")
        return EXIT_OK

    k = _parse_index(cfg["window_index"]) if cfg["window_index"] else (0,) * d
    z = grid.complex_points()
    if what == "stft":
        field = hagedorn_stft_closed(index, k, frame, z)
    elif what == "wigner":
        field = hagedorn_wigner_closed(index, k, frame, z)
    elif what == "spectrogram":
        field = np.abs(hagedorn_stft_closed(index, k, frame, z)) ** 2
    else:
        raise ConfigError(f"unknown sample kind {what!r}")
    from .grids import GridFunction
    GridFunction(grid=grid, values=np.asarray(field, dtype=complex)).to_csv(
        cfg["out"], comment=comment)
    return EXIT_OK


def cmd_williamson(args) -> int:
    cfg = _resolve(args, ["matrix", "out"])
    if not cfg["matrix"]:
        raise ConfigError("--matrix M.json is required")
    cov = load_covariance(cfg["matrix"])
    sym, ks = williamson(cov.M)
    admissible = gaussian_admissible(cov.M)
    print("symplectic factor T:")
    print(np.array2string(sym.T, precision=10))
    print("symplectic eigenvalues k:", ", ".join(f"{v:.12g}" for v in ks))
    print(f"admissible (M + iJ/4pi >= 0): {admissible} "
          f"(threshold k >= 1/(4 pi) = {1/(4*math.pi):.12g})")
    if cfg["out"]:
        with open(cfg["out"], "w") as fh:
            json.dump({"T": sym.T.tolist(), "k": ks.tolist(),
                       "admissible": bool(admissible)}, fh, indent=1)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="locspec",
        description="Spectra of localization operators: closed-form eigenvalue "
                    "tables, dense-matrix cross-validation, phase-space samplers.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="TOML or JSON config file (flags override)")
        p.add_argument("--out", help="output path (default: stdout where sensible)")

    p = sub.add_parser("eigvals", help="eigenvalue table for a mask and window/state")
    common(p)
    p.add_argument("--mask", help="mask descriptor or mask JSON path")
    p.add_argument("--window", help="hermite:K or hagedorn:K (with --frame)")
    p.add_argument("--state", help="parity | thermal:E=.. | gaussian (with --matrix)")
    p.add_argument("--frame", help="Lagrangian frame JSON file")
    p.add_argument("--matrix", help="covariance JSON file for gaussian states")
    p.add_argument("--nmax", type=int, help="largest index per axis (default 8)")
    p.add_argument("--d", type=int, help="dimension (default 1 or from mask/frame)")
    p.add_argument("--method", choices=["closed", "matrix", "both"])
    p.add_argument("--n-basis", type=int, help="matrix truncation per axis")
    p.add_argument("--tol", type=float, help="agreement tolerance for --method both")

    p = sub.add_parser("verify", help="double-orthogonality verification report")
    common(p)
    p.add_argument("--mask")
    p.add_argument("--window", help="family: hermite:K or hagedorn:K")
    p.add_argument("--frame")
    p.add_argument("--d", type=int)
    p.add_argument("--n-basis", type=int)
    p.add_argument("--tol", type=float)

    p = sub.add_parser("sample", help="CSV dumps of wavepackets / phase-space fields")
    common(p)
    p.add_argument("--frame")
    p.add_argument("--index", help="multi-index, e.g. 2,1")
    p.add_argument("--what", choices=["wavepacket", "stft", "wigner", "spectrogram"])
    p.add_argument("--window-index", help="window multi-index for stft/wigner")
    p.add_argument("--grid", help="L,N (extent and points per axis)")
    p.add_argument("--d", type=int)

    p = sub.add_parser("williamson", help="normal form + admissibility of a covariance")
    common(p)
    p.add_argument("--matrix", help="covariance JSON file")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {"eigvals": cmd_eigvals, "verify": cmd_verify,
                "sample": cmd_sample, "williamson": cmd_williamson}
    try:
        return handlers[args.command](args)
    except (ConfigError, DomainError, FrameError, FileNotFoundError, KeyError,
            json.JSONDecodeError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ToleranceError as exc:
        print(f"tolerance failure: {exc}", file=sys.stderr)
        return EXIT_TOLERANCE


if __name__ == "__main__":
    sys.exit(main())
