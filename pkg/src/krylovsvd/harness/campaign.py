"""Monte-Carlo campaigns that turn probabilistic error guarantees into
binomial pass/fail tests.

Each trial derives its own seeds from the master seed with
``numpy.random.SeedSequence.spawn``, so trial ``i`` gives the same result
whether trials run sequentially or on a thread pool.
"""
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from .. import bounds
from ..errors import ConfigError, InvalidAlphaError, NoGapError
from ..linalg import svd_reference
from ..randinit import construct_Z, gaussian_matrix, tan_angle_kdim
from ..solvers import extract_rank_k, sketch_basis
from .mmio import read_matrix_market
from .report import ExperimentReport, TrialRecord
from .spectra import KINDS, SpectrumSpec, synth_factors

CAMPAIGNS = ("lanczos-random", "power-random", "gap-dependent", "initialization")
METHODS = ("power", "lanczos", "both")


@dataclass
class CampaignConfig:
    campaign: str = "lanczos-random"
    method: str = "both"
    m: int = 100
    n: int = 80
    k: int = 5
    p: int = 25
    epsilon: float = 0.25
    alpha: float = 2.0
    trials: int = 200
    seed: int = 0
    slack: float = 1e-6
    norm: str = "both"
    workers: int = 1
    matrix_path: str = ""
    spectrum: dict = field(default_factory=lambda: {"kind": "geometric", "ratio": 0.9})

    @classmethod
    def from_mapping(cls, data):
        data = dict(data)
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(unknown[0], "unknown field")
        cfg = cls(**data)
        cfg.validate()
        return cfg

    def to_dict(self):
        return asdict(self)

    def spectrum_spec(self, seed):
        spec = dict(self.spectrum)
        try:
            if "values" in spec:
                spec["values"] = tuple(spec["values"])
            return SpectrumSpec(m=self.m, n=self.n, seed=seed, **spec)
        except TypeError as exc:
            raise ConfigError("spectrum", str(exc)) from None
        except ValueError as exc:
            raise ConfigError("spectrum.kind", str(exc)) from None

    def validate(self):
        if self.campaign not in CAMPAIGNS:
            raise ConfigError("campaign", f"expected one of {CAMPAIGNS}, got {self.campaign!r}")
        if self.method not in METHODS:
            raise ConfigError("method", f"expected one of {METHODS}, got {self.method!r}")
        if self.norm not in ("spectral", "frobenius", "both"):
            raise ConfigError("norm", f"expected spectral, frobenius or both, got {self.norm!r}")
        for name in ("m", "n", "k", "p", "trials", "workers"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or isinstance(v, bool) or v < 1:
                raise ConfigError(name, f"must be a positive integer, got {v!r}")
        if not self.k < self.p <= min(self.m, self.n):
            raise ConfigError("p", f"need k < p <= min(m, n), got k={self.k}, p={self.p}, "
                                   f"m={self.m}, n={self.n}")
        if not (isinstance(self.epsilon, (int, float)) and math.isfinite(self.epsilon)
                and self.epsilon > 0.0):
            raise ConfigError("epsilon", f"must be positive, got {self.epsilon!r}")
        if self.campaign in ("lanczos-random", "power-random") and self.epsilon > 1.0:
            raise ConfigError("epsilon", f"must be at most 1, got {self.epsilon}")
        if self.slack < 0.0:
            raise ConfigError("slack", f"must be >= 0, got {self.slack}")
        if not isinstance(self.seed, (int, np.integer)) or self.seed < 0:
            raise ConfigError("seed", f"must be a nonnegative integer, got {self.seed!r}")
        try:
            bounds.initialization_bound(self.n, self.p, self.k, self.alpha)
        except InvalidAlphaError as exc:
            raise ConfigError("alpha", str(exc)) from None
        if not isinstance(self.spectrum, dict):
            raise ConfigError("spectrum", "must be a table")
        if self.spectrum.get("kind") not in KINDS:
            raise ConfigError("spectrum.kind", f"expected one of {KINDS}, got "
                                               f"{self.spectrum.get('kind')!r}")
        self.spectrum_spec(0)
        return self


def trial_seeds(master, trials):
    """``(x_seed, matrix_seed)`` pairs derived from the master seed."""
    children = np.random.SeedSequence(int(master)).spawn(trials)
    return [tuple(int(s) for s in c.generate_state(2, np.uint64)) for c in children]


def _load_fixed(cfg):
    if not cfg.matrix_path:
        return None
    M = read_matrix_market(cfg.matrix_path)
    if M.shape != (cfg.m, cfg.n):
        raise ConfigError("matrix_path", f"file is {M.shape[0]}x{M.shape[1]}, "
                                         f"config says {cfg.m}x{cfg.n}")
    return M, svd_reference(M)


def _init_angle(svd, X, k):
    V = svd.V
    if V.shape[0] != V.shape[1]:
        return math.nan
    Z = construct_Z(V, X, k)
    return tan_angle_kdim(V[:, :k], X @ Z)


def _budget(cfg, method, sigma):
    if cfg.campaign == "lanczos-random":
        return bounds.budget_lanczos_random(cfg.n, cfg.p, cfg.k, cfg.epsilon, cfg.alpha)
    if cfg.campaign == "power-random":
        return bounds.budget_power_gap_independent(cfg.n, cfg.p, cfg.k, cfg.epsilon, cfg.alpha)
    sk, sp1 = float(sigma[cfg.k - 1]), float(sigma[cfg.p])
    try:
        return bounds.budget_gap_dependent(sk, sp1, cfg.n, cfg.p, cfg.k, cfg.epsilon,
                                           cfg.alpha, method=method, target="norm")
    except (NoGapError, ValueError) as exc:
        raise ConfigError("spectrum", str(exc)) from None


def _methods(cfg):
    if cfg.campaign == "lanczos-random":
        return ("lanczos",)
    if cfg.campaign == "power-random":
        return ("power",)
    if cfg.campaign == "initialization":
        return ("init",)
    return ("power", "lanczos") if cfg.method == "both" else (cfg.method,)


def run_trial(cfg, index, x_seed, matrix_seed, fixed=None):
    """All records of one trial (one per method)."""
    if fixed is None:
        M, svd = synth_factors(cfg.spectrum_spec(matrix_seed))
    else:
        M, svd = fixed
    X = gaussian_matrix(cfg.n, cfg.p, x_seed)
    tan0 = _init_angle(svd, X, cfg.k)
    sigma = svd.sigma
    records = []
    for method in _methods(cfg):
        rec = TrialRecord(trial=index, seed=x_seed, matrix_seed=matrix_seed,
                          method=method, budget=0, tan_theta_init=tan0)
        if method == "init":
            rec.bound = bounds.initialization_bound(cfg.n, cfg.p, cfg.k, cfg.alpha)
            rec.verdict = tan0 <= rec.bound
            records.append(rec)
            continue
        budget = _budget(cfg, method, sigma)
        Q = sketch_basis(M, X, method, budget.count)
        res = extract_rank_k(M, Q, cfg.k, budget.count)
        rec.budget = budget.count
        rec.spectral_err_sq = res.spectral_err_sq
        rec.frobenius_err_sq = res.frobenius_err_sq
        rec.bound = bounds.bound_value("random", sigma, cfg.k, cfg.p, cfg.epsilon)
        spec_ok = bounds.verify(res, rec.bound, cfg.slack).passed
        if cfg.campaign == "gap-dependent":
            rec.bound_frobenius = bounds.bound_value("frobenius", sigma, cfg.k, cfg.p, cfg.epsilon)
            frob_ok = bounds.verify(res.frobenius_err_sq, rec.bound_frobenius, cfg.slack).passed
            rec.verdict = {"spectral": spec_ok, "frobenius": frob_ok,
                           "both": spec_ok and frob_ok}[cfg.norm]
        else:
            rec.verdict = spec_ok
        records.append(rec)
    return records


def run_campaign(config):
    """Run every trial of ``config`` (a :class:`CampaignConfig` or mapping)."""
    cfg = config if isinstance(config, CampaignConfig) else CampaignConfig.from_mapping(config)
    cfg.validate()
    fixed = _load_fixed(cfg)
    seeds = trial_seeds(cfg.seed, cfg.trials)

    def one(i):
        return run_trial(cfg, i, seeds[i][0], seeds[i][1], fixed)

    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            per_trial = list(pool.map(one, range(cfg.trials)))
    else:
        per_trial = [one(i) for i in range(cfg.trials)]
    records = [r for recs in per_trial for r in recs]
    q = max(0.0, 1.0 - bounds.failure_probability(cfg.alpha))
    required = bounds.required_rate(q, cfg.trials)
    rate = sum(r.verdict for r in records) / len(records)
    return ExperimentReport(
        config=cfg.to_dict(),
        trials=records,
        pass_rate=rate,
        required_rate=required,
        guaranteed_rate=q,
        overall_pass=rate >= required,
    )
