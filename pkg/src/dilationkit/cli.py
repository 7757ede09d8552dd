"""Command-line front-end.

Subcommands load frames, framings and operator-valued measures from JSON
files, run the library constructions, and print a deterministic report:
sorted keys, no timestamps, all randomness drawn from --seed.  Exit code 0
means every check passed, 1 means a check failed or a domain error occurred,
2 means the invocation or an input file could not be parsed.

Input schemas (entries are bare reals or [re, im] pairs):
  frame    {"dim": d, "vectors": [vector, ...]}
  ovm      {"dim_in": d, "dim_out": e, "atoms": [[[entry, ...], ...], ...]}
  framing  {"dim": d, "pairs": [{"x": vector, "y": vector}, ...]}
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import tempfile

import numpy as np

from .errors import DilationKitError
from .frames import (
    Frame,
    canonical_dual,
    dilate_parseval_to_onb,
    frame_bounds,
    frame_operator,
)
from .framings import (
    Framing,
    apply_rescale,
    check_reconstruction,
    is_dual_frame_pair,
    rescale_sqrt,
)
from .linalg import lp_norm, spectral_norm
from .ovm import Ovm, classify
from .dilation import build_block_dilation, naimark_dilate, verify_dilation
from . import rademacher


class SchemaError(ValueError):
    """Input file did not match the documented JSON schema."""


def _entry(value, where):
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    if (
        isinstance(value, list)
        and len(value) == 2
        and all(isinstance(c, (int, float)) and not isinstance(c, bool) for c in value)
    ):
        return complex(value[0], value[1])
    raise SchemaError(f"{where}: entries must be reals or [re, im] pairs")


def _vector(obj, dim, where):
    if not isinstance(obj, list) or len(obj) != dim:
        raise SchemaError(f"{where}: expected a vector of length {dim}")
    entries = [_entry(v, where) for v in obj]
    if any(isinstance(e, complex) for e in entries):
        return np.array([complex(e) for e in entries])
    return np.array(entries)


def _matrix(obj, rows, cols, where):
    if not isinstance(obj, list) or len(obj) != rows:
        raise SchemaError(f"{where}: expected {rows} rows")
    data = [_vector(row, cols, f"{where} row {i}") for i, row in enumerate(obj)]
    if any(np.iscomplexobj(row) for row in data):
        data = [row.astype(complex) for row in data]
    return np.stack(data)


def load_frame(doc) -> Frame:
    if not isinstance(doc, dict) or "dim" not in doc or "vectors" not in doc:
        raise SchemaError('frame files need keys "dim" and "vectors"')
    dim = doc["dim"]
    if not isinstance(dim, int) or dim < 1:
        raise SchemaError('"dim" must be a positive integer')
    vectors = doc["vectors"]
    if not isinstance(vectors, list) or not vectors:
        raise SchemaError('"vectors" must be a non-empty list')
    return Frame(_matrix(vectors, len(vectors), dim, "vectors"))


def load_ovm(doc) -> Ovm:
    for key in ("dim_in", "dim_out", "atoms"):
        if not isinstance(doc, dict) or key not in doc:
            raise SchemaError('ovm files need keys "dim_in", "dim_out" and "atoms"')
    dim_in, dim_out = doc["dim_in"], doc["dim_out"]
    for d in (dim_in, dim_out):
        if not isinstance(d, int) or d < 1:
            raise SchemaError("dimensions must be positive integers")
    atoms = doc["atoms"]
    if not isinstance(atoms, list) or not atoms:
        raise SchemaError('"atoms" must be a non-empty list of matrices')
    stack = [
        _matrix(atom, dim_out, dim_in, f"atom {i}") for i, atom in enumerate(atoms)
    ]
    if any(np.iscomplexobj(a) for a in stack):
        stack = [a.astype(complex) for a in stack]
    return Ovm(np.stack(stack))


def load_framing(doc) -> Framing:
    if not isinstance(doc, dict) or "dim" not in doc or "pairs" not in doc:
        raise SchemaError('framing files need keys "dim" and "pairs"')
    dim = doc["dim"]
    if not isinstance(dim, int) or dim < 1:
        raise SchemaError('"dim" must be a positive integer')
    pairs = doc["pairs"]
    if not isinstance(pairs, list) or not pairs:
        raise SchemaError('"pairs" must be a non-empty list')
    xs, ys = [], []
    for i, pair in enumerate(pairs):
        if not isinstance(pair, dict) or "x" not in pair or "y" not in pair:
            raise SchemaError(f'pair {i} needs keys "x" and "y"')
        xs.append(_vector(pair["x"], dim, f"pair {i} x"))
        ys.append(_vector(pair["y"], dim, f"pair {i} y"))
    if any(np.iscomplexobj(v) for v in xs + ys):
        xs = [v.astype(complex) for v in xs]
        ys = [v.astype(complex) for v in ys]
    return Framing(np.stack(xs), np.stack(ys))


def _digest(command: str, doc, flags: dict) -> str:
    canonical = json.dumps(
        {"command": command, "file": doc, "flags": flags},
        sort_keys=True,
        separators=(",", ":"),
        allow_nan=False,
    )
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def _check(name: str, value: float, threshold: float, passed=None) -> dict:
    if passed is None:
        passed = bool(value <= threshold)
    return {
        "name": name,
        "value": float(value),
        "threshold": float(threshold),
        "pass": bool(passed),
    }


def _encode_array(arr: np.ndarray):
    if np.iscomplexobj(arr):
        if arr.ndim == 1:
            return [[float(v.real), float(v.imag)] for v in arr]
        return [[[float(v.real), float(v.imag)] for v in row] for row in arr]
    return arr.tolist()


def _emit(report: dict) -> int:
    report["pass"] = all(c["pass"] for c in report["checks"])
    print(json.dumps(report, sort_keys=True, indent=2, allow_nan=False))
    return 0 if report["pass"] else 1


def _write_json_atomic(path: str, doc) -> None:
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as handle:
            json.dump(doc, handle, sort_keys=True, indent=2, allow_nan=False)
            handle.write("\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def cmd_frame_analyze(args) -> int:
    doc = _load_doc(args.path)
    frame = load_frame(doc)
    flags = {"dual": args.dual, "dilate": args.dilate, "tol": args.tol}
    report = {
        "command": "frame-analyze",
        "inputs_digest": _digest("frame-analyze", doc, flags),
        "checks": [],
        "artifacts": {},
    }
    bounds = frame_bounds(frame)
    report["artifacts"]["bounds"] = {"lower": bounds.lower, "upper": bounds.upper}
    report["artifacts"]["tight"] = bounds.is_tight()
    report["artifacts"]["parseval"] = bounds.is_parseval()
    if args.dual:
        dual = canonical_dual(frame)
        recon = dual.vectors.T @ frame.vectors.conj()
        residual = spectral_norm(recon - np.eye(frame.dim, dtype=recon.dtype))
        report["checks"].append(_check("dual_reconstruction_residual", residual, 1e-10))
        report["artifacts"]["dual_vectors"] = _encode_array(dual.vectors)
    if args.dilate:
        dilation = dilate_parseval_to_onb(frame, tol=args.tol)
        compressed = dilation.embedding.conj().T
        roundtrip = float(
            np.abs(compressed - frame.vectors.conj().T).max()
        )
        report["checks"].append(_check("onb_roundtrip_residual", roundtrip, 1e-9))
        report["artifacts"]["embedding"] = _encode_array(dilation.embedding)
    return _emit(report)


def cmd_ovm_dilate(args) -> int:
    doc = _load_doc(args.path)
    ovm = load_ovm(doc)
    flags = {
        "mode": "naimark" if args.naimark else "block",
        "tol": args.tol,
        "seed": args.seed,
        "max_atoms": args.max_atoms,
        "output": bool(args.output),
    }
    report = {
        "command": "ovm-dilate",
        "inputs_digest": _digest("ovm-dilate", doc, flags),
        "checks": [],
        "artifacts": {},
    }
    if args.max_atoms != 16:
        print(
            f"subset enumeration over 2^{ovm.atom_count} = {1 << ovm.atom_count} "
            f"subsets (max-atoms overridden to {args.max_atoms})",
            file=sys.stderr,
        )
    if args.naimark:
        dilation = naimark_dilate(ovm, rel_tol=args.tol)
        triple = dilation.as_triple()
        gram = dilation.isometry.conj().T @ dilation.isometry
        gram_residual = spectral_norm(gram - np.eye(ovm.dim_in, dtype=gram.dtype))
        report["checks"].append(_check("isometry_gram_residual", gram_residual, 1e-10))
    else:
        triple = build_block_dilation(ovm, rel_tol=args.tol)
    verdict = verify_dilation(
        ovm, triple, seed=args.seed, max_exhaustive_atoms=args.max_atoms
    )
    cls = classify(
        ovm,
        sampled=ovm.atom_count > args.max_atoms,
        seed=args.seed,
        max_exhaustive_atoms=args.max_atoms,
    )
    report["artifacts"]["classification"] = {
        "is_probability": cls.is_probability,
        "is_positive": cls.is_positive,
        "is_projection_valued": cls.is_projection_valued,
        "is_spectral": cls.is_spectral,
        "is_self_adjoint": cls.is_self_adjoint,
        "ovm_norm": cls.ovm_norm,
        "sampled": cls.sampled,
    }
    report["checks"].append(_check("eval_residual", verdict.eval_residual, 1e-10))
    report["checks"].append(_check("f_total_residual", verdict.f_total_residual, 1e-10))
    report["checks"].append(
        _check("f_multiplicative_residual", verdict.f_multiplicative_residual, 1e-10)
    )
    report["checks"].append(
        _check(
            "rank_preservation",
            0.0 if verdict.ranks_match else 1.0,
            0.0,
            passed=verdict.ranks_match,
        )
    )
    report["artifacts"]["sampled"] = verdict.sampled
    report["artifacts"]["block_ranks"] = list(triple.block_ranks)
    report["artifacts"]["total_dim"] = triple.total_dim
    if args.output:
        _write_json_atomic(
            args.output,
            {
                "left": _encode_array(triple.left),
                "right": _encode_array(triple.right),
                "f_atoms": [_encode_array(f) for f in triple.f_atoms],
                "block_ranks": list(triple.block_ranks),
            },
        )
        report["artifacts"]["output_path"] = args.output
    return _emit(report)


def cmd_framing_rescale(args) -> int:
    doc = _load_doc(args.path)
    framing = load_framing(doc)
    flags = {"tol": args.tol}
    report = {
        "command": "framing-rescale",
        "inputs_digest": _digest("framing-rescale", doc, flags),
        "checks": [],
        "artifacts": {},
    }
    residual = check_reconstruction(framing)
    report["checks"].append(_check("reconstruction_residual", residual, args.tol))
    plan = rescale_sqrt(framing)
    rescaled = apply_rescale(framing, plan)
    x_frame, y_frame = rescaled.frames()
    verdict = is_dual_frame_pair(x_frame, y_frame, tol=args.tol)
    report["checks"].append(
        _check("dual_pair_verdict", 0.0 if verdict else 1.0, 0.0, passed=verdict)
    )
    parseval_residual = spectral_norm(
        frame_operator(x_frame) - np.eye(framing.dim, dtype=x_frame.vectors.dtype)
    )
    report["artifacts"]["alphas"] = plan.alphas.tolist()
    report["artifacts"]["betas"] = plan.betas.tolist()
    report["artifacts"]["rescaled_parseval_residual"] = parseval_residual
    report["artifacts"]["rescaled_is_parseval"] = bool(parseval_residual <= 1e-8)
    return _emit(report)


def cmd_chl5(args) -> int:
    if args.nmax < 1 or args.nmax > 11:
        raise SchemaError("--nmax must be between 1 and 11")
    if not args.p > 1.0 or args.p == 2.0:
        raise SchemaError("--p must exceed 1 and differ from 2")
    if args.trials < 100:
        raise SchemaError("--trials must be at least 100")
    flags = {"p": args.p, "nmax": args.nmax, "trials": args.trials, "seed": args.seed}
    report = {
        "command": "chl5",
        "inputs_digest": _digest("chl5", None, flags),
        "checks": [],
        "artifacts": {"levels": {}},
    }
    ratios = {}
    for n in range(1, args.nmax + 1):
        block = rademacher.build_block(n, args.p)
        eps = block.eps
        ortho = int(np.abs(eps @ eps.T - (1 << n) * np.eye(n, dtype=np.int64)).max())
        idem = spectral_norm(block.projection @ block.projection - block.projection)
        fixes = max(
            float(np.abs(block.projection @ block.r[i] - block.r[i]).max())
            for i in range(n)
        )
        parseval = rademacher.parseval_check(block, trials=args.trials, seed=args.seed)
        dual_side = rademacher.dual_side_check(block)
        r_norm_defect = max(
            abs(lp_norm(block.r[i], block.p) - 1.0) for i in range(n)
        )
        ratio = rademacher.projection_norm_evidence(
            block, trials=args.trials, seed=args.seed
        )
        ratios[n] = ratio
        kh = rademacher.khintchine_report(block, trials=args.trials, seed=args.seed)
        prefix = f"n{n}_"
        report["checks"].append(_check(prefix + "sign_orthogonality", ortho, 0.0))
        report["checks"].append(_check(prefix + "projection_idempotent", idem, 1e-10))
        report["checks"].append(_check(prefix + "projection_fixes_r", fixes, 1e-10))
        report["checks"].append(_check(prefix + "parseval_residual", parseval, 1e-9))
        report["checks"].append(_check(prefix + "dual_side_residual", dual_side, 1e-12))
        report["checks"].append(_check(prefix + "r_norm_defect", r_norm_defect, 1e-12))
        report["artifacts"]["levels"][str(n)] = {
            "projection_ratio": ratio,
            "khintchine_lower": kh.lower,
            "khintchine_upper": kh.upper,
        }
    swept = [ratios[n] for n in sorted(ratios) if n >= 2]
    if len(swept) >= 2:
        spread = max(swept) / min(swept)
        report["checks"].append(_check("projection_ratio_spread", spread, 2.0))
    if len(swept) >= 3:
        # a strictly increasing run of two points is noise, not growth
        monotone = all(b > a for a, b in zip(swept, swept[1:]))
        report["checks"].append(
            _check(
                "projection_ratio_no_growth",
                1.0 if monotone else 0.0,
                0.0,
                passed=not monotone,
            )
        )
    framing = rademacher.assemble_framing(args.p, args.nmax)
    recon = check_reconstruction(framing)
    report["checks"].append(_check("assembled_reconstruction_residual", recon, 1e-9))
    plan = rescale_sqrt(framing)
    rescaled = apply_rescale(framing, plan)
    x_frame, y_frame = rescaled.frames()
    parseval_residual = spectral_norm(
        frame_operator(x_frame) - np.eye(framing.dim)
    )
    report["checks"].append(
        _check("assembled_rescaled_parseval_residual", parseval_residual, 1e-10)
    )
    verdict = is_dual_frame_pair(x_frame, y_frame)
    report["checks"].append(
        _check("assembled_dual_pair_verdict", 0.0 if verdict else 1.0, 0.0, passed=verdict)
    )
    report["artifacts"]["pair_count"] = framing.count
    report["artifacts"]["dim"] = framing.dim
    return _emit(report)


def _load_doc(path: str):
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return json.load(handle)
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path} is not valid JSON: {exc}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dilationkit",
        description="Frame, framing and operator-valued-measure dilation toolkit",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    frame = sub.add_parser("frame-analyze", help="frame bounds, dual, ONB dilation")
    frame.add_argument("path", help="frame JSON file")
    frame.add_argument("--dual", action="store_true", help="compute the canonical dual")
    frame.add_argument(
        "--dilate", action="store_true", help="dilate a Parseval frame to an ONB"
    )
    frame.add_argument("--tol", type=float, default=1e-8)
    frame.set_defaults(handler=cmd_frame_analyze)

    ovm = sub.add_parser("ovm-dilate", help="dilate a measure, verify the triple")
    ovm.add_argument("path", help="ovm JSON file")
    mode = ovm.add_mutually_exclusive_group(required=True)
    mode.add_argument("--naimark", action="store_true", help="positive-measure dilation")
    mode.add_argument("--block", action="store_true", help="general block dilation")
    ovm.add_argument("--tol", type=float, default=1e-10)
    ovm.add_argument("--seed", type=int, default=0)
    ovm.add_argument(
        "--max-atoms",
        type=int,
        default=16,
        help="exhaustive subset limit; beyond it verification samples subsets",
    )
    ovm.add_argument("--output", help="write the dilation triple to this JSON file")
    ovm.set_defaults(handler=cmd_ovm_dilate)

    framing = sub.add_parser("framing-rescale", help="norm-balancing rescale plan")
    framing.add_argument("path", help="framing JSON file")
    framing.add_argument("--tol", type=float, default=1e-8)
    framing.set_defaults(handler=cmd_framing_rescale)

    chl = sub.add_parser("chl5", help="sign-matrix framing sweep on l_p blocks")
    chl.add_argument("--p", type=float, required=True, help="exponent, p > 1 and p != 2")
    chl.add_argument("--nmax", type=int, default=6, help="largest block level, <= 11")
    chl.add_argument("--trials", type=int, default=200)
    chl.add_argument("--seed", type=int, default=0)
    chl.set_defaults(handler=cmd_chl5)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.handler(args)
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DilationKitError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
