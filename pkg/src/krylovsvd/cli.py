"""Command line interface: ``svd``, ``verify``, ``budget`` and ``spectrum``."""
import argparse
import sys

from . import bounds
from .errors import ConfigError, InvalidAlphaError, KrylovSVDError
from .harness.campaign import CAMPAIGNS, CampaignConfig, run_campaign
from .harness.mmio import read_matrix_market, write_matrix_market
from .harness.report import _encode, emit_report
from .harness.spectra import KINDS, SpectrumSpec, synth_matrix
from .linalg import svd_reference
from .randinit import gaussian_matrix
from .solvers import extract_rank_k, sketch_basis

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib


def load_config(path):
    """Read a TOML file; keys mirror the long option names."""
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path}: {exc}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError("config", f"{path}: {exc}") from None


def _merged(args, keys):
    """Config-file values overridden by explicitly given flags."""
    out = dict(load_config(args.config)) if args.config else {}
    for key in keys:
        v = getattr(args, key, None)
        if v is not None:
            out[key] = v
    return out


def _emit_obj(obj, out):
    text = _encode(obj, 2, 0) + "\n"
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_svd(args):
    opts = _merged(args, ("k", "p", "method", "epsilon", "alpha", "iterations", "seed"))
    if "file" not in opts and args.file is None:
        raise ConfigError("file", "a Matrix Market file is required")
    M = read_matrix_market(args.file or opts["file"])
    m, n = M.shape
    k, p = opts.get("k", 5), opts.get("p")
    p = p if p is not None else min(2 * k, m, n)
    if not 0 < k <= p <= min(m, n):
        raise ConfigError("p", f"need 0 < k <= p <= min(m, n), got k={k}, p={p}, shape {m}x{n}")
    method = opts.get("method", "lanczos")
    if method not in ("power", "lanczos"):
        raise ConfigError("method", f"expected power or lanczos, got {method!r}")
    eps, alpha = opts.get("epsilon", 0.25), opts.get("alpha", 2.0)
    if opts.get("iterations") is not None:
        count, theorem = int(opts["iterations"]), "fixed"
    elif k < p:
        rule = (bounds.budget_lanczos_random if method == "lanczos"
                else bounds.budget_power_gap_independent)
        try:
            b = rule(n, p, k, eps, alpha)
        except InvalidAlphaError as exc:
            raise ConfigError("alpha", f"{exc}; lower --alpha or pass --iterations") from None
        count, theorem = b.count, b.theorem
    else:
        raise ConfigError("iterations", "give --iterations when k == p")
    X = gaussian_matrix(n, p, opts.get("seed", 0))
    Q = sketch_basis(M, X, method, count)
    res = extract_rank_k(M, Q, k, count)
    sigma = svd_reference(res.approx_k).sigma[:k]
    obj = {
        "shape": [m, n],
        "k": k,
        "p": p,
        "method": method,
        "iterations": count,
        "budget_rule": theorem,
        "singular_values": [float(s) for s in sigma],
        "spectral_err_sq": res.spectral_err_sq,
        "frobenius_err_sq": res.frobenius_err_sq,
    }
    _emit_obj(obj, args.out)
    return 0


def cmd_verify(args):
    opts = _merged(args, ("campaign", "method", "m", "n", "k", "p", "epsilon", "alpha",
                          "trials", "seed", "slack", "norm", "workers", "matrix_path"))
    if args.spectrum_kind is not None:
        opts.setdefault("spectrum", {})["kind"] = args.spectrum_kind
    for key in ("ratio", "exponent", "gap_position", "gap_ratio"):
        v = getattr(args, key)
        if v is not None:
            opts.setdefault("spectrum", {})[key] = v
    if "spectrum" in opts:
        opts["spectrum"].setdefault("kind", "geometric")
    report = run_campaign(CampaignConfig.from_mapping(opts))
    text = emit_report(report, args.format, args.out)
    if args.out is None:
        sys.stdout.write(text)
    verdict = "PASS" if report.overall_pass else "FAIL"
    print(f"{verdict}: pass_rate={report.pass_rate:.4f} required={report.required_rate:.4f}",
          file=sys.stderr)
    return 0 if report.overall_pass else 1


def cmd_budget(args):
    opts = _merged(args, ("method", "n", "p", "k", "epsilon", "alpha", "beta", "gap", "target"))
    eps = opts.get("epsilon", 0.25)
    method = opts.get("method", "lanczos")
    if method not in ("power", "lanczos"):
        raise ConfigError("method", f"expected power or lanczos, got {method!r}")
    if opts.get("beta") is not None:
        if method != "lanczos":
            raise ConfigError("beta", "warm-start budgets exist for lanczos only")
        b = bounds.budget_lanczos_warm(opts["beta"], eps)
    else:
        for key in ("n", "p", "k"):
            if opts.get(key) is None:
                raise ConfigError(key, "required")
        n, p, k, alpha = opts["n"], opts["p"], opts["k"], opts.get("alpha", 2.0)
        if opts.get("gap") is not None:
            b = bounds.budget_gap_dependent(opts["gap"], 1.0, n, p, k, eps, alpha,
                                            method=method, target=opts.get("target", "angle"))
        elif method == "lanczos":
            b = bounds.budget_lanczos_random(n, p, k, eps, alpha)
        else:
            b = bounds.budget_power_gap_independent(n, p, k, eps, alpha)
    _emit_obj({
        "count": b.count,
        "theorem": b.theorem,
        "epsilon": float(b.epsilon),
        "alpha": float(b.alpha),
        "failure_probability": b.failure_probability,
        "raw": b.raw,
    }, args.out)
    return 0


def cmd_spectrum(args):
    opts = _merged(args, ("m", "n", "seed"))
    spec = dict(opts.pop("spectrum", {}))
    if args.spectrum_kind is not None:
        spec["kind"] = args.spectrum_kind
    for key in ("ratio", "exponent", "gap_position", "gap_ratio", "leading"):
        v = getattr(args, key)
        if v is not None:
            spec[key] = v
    if args.values is not None:
        spec["values"] = tuple(float(x) for x in args.values.split(","))
    spec.setdefault("kind", "geometric")
    for key in ("m", "n"):
        if opts.get(key) is None:
            raise ConfigError(key, "required")
    try:
        if "values" in spec:
            spec["values"] = tuple(spec["values"])
        S = SpectrumSpec(m=opts["m"], n=opts["n"], seed=opts.get("seed", 0), **spec)
        M = synth_matrix(S)
    except (TypeError, ValueError) as exc:
        raise ConfigError("spectrum", str(exc)) from None
    if args.out is None:
        raise ConfigError("out", "an output path is required")
    write_matrix_market(M, args.out, comment=f"kind={S.kind} seed={S.seed}")
    return 0


def build_parser():
    ap = argparse.ArgumentParser(prog="krylovsvd", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="TOML file with default values for the options")
        p.add_argument("--out", help="output path (default: stdout)")
        p.add_argument("--seed", type=int)
        return p

    def spectrum_flags(p):
        p.add_argument("--spectrum-kind", dest="spectrum_kind", choices=KINDS)
        p.add_argument("--ratio", type=float)
        p.add_argument("--exponent", type=float)
        p.add_argument("--gap-position", dest="gap_position", type=int)
        p.add_argument("--gap-ratio", dest="gap_ratio", type=float)

    p = common(sub.add_parser("svd", help="randomized SVD of a Matrix Market file"))
    p.add_argument("file", nargs="?")
    p.add_argument("--method", choices=("power", "lanczos"))
    p.add_argument("--k", type=int)
    p.add_argument("--p", type=int)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--iterations", type=int, help="fixed t or d instead of a theorem budget")
    p.set_defaults(func=cmd_svd)

    p = common(sub.add_parser("verify", help="run a Monte-Carlo bound campaign"))
    p.add_argument("campaign", nargs="?", choices=CAMPAIGNS)
    p.add_argument("--method", choices=("power", "lanczos", "both"))
    for key in ("m", "n", "k", "p", "trials", "workers"):
        p.add_argument(f"--{key}", type=int)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--slack", type=float)
    p.add_argument("--norm", choices=("spectral", "frobenius", "both"))
    p.add_argument("--matrix", dest="matrix_path")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    spectrum_flags(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("budget", help="print an iteration budget")
    p.add_argument("--config")
    p.add_argument("--out")
    p.add_argument("--method", choices=("power", "lanczos"))
    for key in ("n", "p", "k"):
        p.add_argument(f"--{key}", type=int)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float, help="warm-start angle bound")
    p.add_argument("--gap", type=float, help="sigma_k / sigma_{p+1} for gap-dependent budgets")
    p.add_argument("--target", choices=("angle", "norm"))
    p.set_defaults(func=cmd_budget)

    p = common(sub.add_parser("spectrum", help="synthesize a test matrix"))
    p.add_argument("--m", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--leading", type=float)
    p.add_argument("--values", help="comma-separated explicit singular values")
    spectrum_flags(p)
    p.set_defaults(func=cmd_spectrum)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except KrylovSVDError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
