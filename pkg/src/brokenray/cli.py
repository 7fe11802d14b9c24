"""Command-line interface: ``brokenray <subcommand> [options]``.

Exit codes: 0 success, 2 usage error, 3 configuration mismatch or missing
input, 4 numerical failure.
"""

import argparse
import csv
import json
import math
from pathlib import Path
import sys

import numpy as np

from .errors import ConfigurationError, DomainError, RankDeficiencyError
from .forward import add_noise, load_sinogram, project, save_sinogram
from .geometry import AcquisitionConfig
from .phantoms import load_image, phantom_combined, phantom_disk, save_image
from .pipeline import (artifact_profile, invert, load_cache, precompute, relative_l2,
                       write_pgm)
from .system import SCHEMES, assemble, default_rank, truncated_svd

EXIT_USAGE = 2
EXIT_CONFIG = 3
EXIT_NUMERIC = 4


def _acquisition_args(p, with_grid=True):
    p.add_argument("--R", type=float, default=1.0)
    p.add_argument("--theta", type=float, default=math.pi / 6, help="scattering angle in radians")
    p.add_argument("--chirality", type=int, choices=(1, -1), default=1)
    if with_grid:
        p.add_argument("--M", type=int, default=150, help="radial samples")
        p.add_argument("--N", type=int, default=150, help="angular samples (even)")
        p.add_argument("--epsilon", type=float, default=0.001)


def _common(p):
    p.add_argument("--params", type=Path, help="where to echo effective parameters "
                   "(default: next to the main output)")
    p.add_argument("--threads", type=int, default=1, help="worker threads, 0 = all cores")


def build_parser():
    parser = argparse.ArgumentParser(prog="brokenray", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("phantom", help="write a test phantom")
    p.add_argument("--kind", choices=("disk", "combined"), required=True)
    p.add_argument("--size", type=int, default=150)
    p.add_argument("--R", type=float, default=1.0)
    p.add_argument("--center", type=float, nargs=2, default=(0.05, 0.0))
    p.add_argument("--radius", type=float, default=0.15)
    p.add_argument("--intensity", type=float, default=1.0)
    p.add_argument("--out", type=Path, required=True, help="output stem (.json/.csv)")
    _common(p)

    p = sub.add_parser("forward", help="simulate a sinogram from an image")
    p.add_argument("--image", type=Path, required=True)
    _acquisition_args(p)
    p.add_argument("--noise", type=float, default=0.0, help="multiplicative Gaussian level")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, required=True)
    _common(p)

    p = sub.add_parser("precompute", help="factor the system matrices into an operator cache")
    _acquisition_args(p)
    p.add_argument("--rank-fraction", type=float, default=0.5)
    p.add_argument("--scheme", choices=SCHEMES, default="trapezoid")
    p.add_argument("--cache", type=Path, required=True)
    _common(p)

    p = sub.add_parser("invert", help="reconstruct an image from a sinogram")
    p.add_argument("--sinogram", type=Path, required=True)
    p.add_argument("--cache", type=Path, required=True)
    p.add_argument("--size", type=int, default=150, help="output pixel grid")
    p.add_argument("--exact", type=Path, help="reference image for the error metric")
    p.add_argument("--pgm", type=Path, help="also write an 8-bit PGM preview")
    p.add_argument("--out", type=Path, required=True)
    _common(p)

    p = sub.add_parser("report", help="condition numbers of the system matrices as CSV")
    _acquisition_args(p)
    p.add_argument("--rank-fraction", type=float, default=0.5)
    p.add_argument("--scheme", choices=SCHEMES, default="trapezoid")
    p.add_argument("--cache", type=Path, help="read singular values from an existing cache")
    p.add_argument("--out", type=Path, required=True)
    _common(p)

    p = sub.add_parser("metrics", help="compare a reconstruction with a reference image")
    p.add_argument("--reconstruction", type=Path, required=True)
    p.add_argument("--exact", type=Path, required=True)
    _acquisition_args(p, with_grid=False)
    p.add_argument("--epsilon", type=float, default=0.001)
    p.add_argument("--profile", type=Path, help="write the radial error profile as CSV")
    p.add_argument("--out", type=Path, help="write metrics as JSON")
    _common(p)
    return parser


def _config(args):
    return AcquisitionConfig(R=args.R, theta=args.theta, chirality=args.chirality)


def _echo_params(args, default_path):
    path = args.params or default_path
    params = {k: (str(v) if isinstance(v, Path) else v) for k, v in vars(args).items()}
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_text(json.dumps(params, indent=2, default=list) + "\n")


def _stem_params(out):
    return out.with_name(out.stem + ".params.json")


def cmd_phantom(args):
    if args.kind == "disk":
        img = phantom_disk(args.size, args.R, tuple(args.center), args.radius, args.intensity)
    else:
        img = phantom_combined(args.size, args.R)
    save_image(img, args.out)
    _echo_params(args, _stem_params(args.out))


def cmd_forward(args):
    img = load_image(args.image)
    sino = project(img, _config(args), args.M, args.N, args.epsilon, workers=args.threads)
    sino = add_noise(sino, args.noise, args.seed)
    save_sinogram(sino, args.out)
    _echo_params(args, _stem_params(args.out))


def cmd_precompute(args):
    args.cache.parent.mkdir(parents=True, exist_ok=True)
    precompute(_config(args), args.M, args.N, args.epsilon, args.rank_fraction, args.cache,
               scheme=args.scheme, workers=args.threads)
    _echo_params(args, _stem_params(args.cache))


def cmd_invert(args):
    sino = load_sinogram(args.sinogram)
    cache = load_cache(args.cache)
    exact = load_image(args.exact) if args.exact else None
    report = invert(sino, cache, size=args.size, exact=exact, workers=args.threads)
    save_image(report.image, args.out)
    report.save(args.out.with_name(args.out.stem + ".report.json"))
    if args.pgm:
        write_pgm(report.image, args.pgm)
    _echo_params(args, _stem_params(args.out))
    if report.rel_l2_percent is not None:
        print(f"relative L2 error: {report.rel_l2_percent:.2f}%")


def condition_table(cache_or_operators):
    """Rows ``(n, kappa_full, kappa_truncated, sigma_{r+1})``."""
    return [(op.n, op.full_condition_number, op.condition_number, op.truncation_error)
            for op in cache_or_operators]


def cmd_report(args):
    if args.cache is not None:
        operators = load_cache(args.cache).operators
    else:
        cfg = _config(args)
        rank = default_rank(args.M, args.rank_fraction)
        operators = [truncated_svd(assemble(n, cfg, args.M, args.epsilon, scheme=args.scheme), rank)
                     for n in range(args.N // 2 + 1)]
    args.out.parent.mkdir(parents=True, exist_ok=True)
    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["n", "kappa_full", "kappa_truncated", "sigma_r_plus_1"])
        for row in condition_table(operators):
            writer.writerow([row[0]] + [f"{v:.17g}" for v in row[1:]])
    _echo_params(args, _stem_params(args.out))


def cmd_metrics(args):
    rec = load_image(args.reconstruction)
    exact = load_image(args.exact)
    cfg = _config(args)
    err = relative_l2(rec, exact, cfg)
    edges, values = artifact_profile(rec, exact, cfg, epsilon=args.epsilon)
    print(f"relative L2 error: {err:.2f}%")
    if args.profile:
        np.savetxt(args.profile, np.column_stack([edges[:-1], edges[1:], values]),
                   delimiter=",", header="rho_lo,rho_hi,mean_abs_error", comments="", fmt="%.17g")
    if args.out:
        Path(args.out).write_text(json.dumps({"rel_l2_percent": err}, indent=2) + "\n")
    default = (_stem_params(args.out) if args.out else
               args.reconstruction.with_name(args.reconstruction.name + ".metrics.params.json"))
    _echo_params(args, default)


COMMANDS = {
    "phantom": cmd_phantom,
    "forward": cmd_forward,
    "precompute": cmd_precompute,
    "invert": cmd_invert,
    "report": cmd_report,
    "metrics": cmd_metrics,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        COMMANDS[args.command](args)
    except (ConfigurationError, FileNotFoundError) as exc:
        print(f"brokenray {args.command}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DomainError as exc:
        print(f"brokenray {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (RankDeficiencyError, np.linalg.LinAlgError) as exc:
        print(f"brokenray {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return 0


if __name__ == "__main__":
    sys.exit(main())
