"""Experiment reports and their JSON / CSV serializations."""
import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field, fields

from ..errors import ReportIOError

TRIAL_FIELDS = (
    "trial",
    "seed",
    "matrix_seed",
    "method",
    "budget",
    "spectral_err_sq",
    "frobenius_err_sq",
    "tan_theta_init",
    "bound",
    "bound_frobenius",
    "verdict",
)


@dataclass
class TrialRecord:
    trial: int
    seed: int
    matrix_seed: int
    method: str
    budget: int
    spectral_err_sq: float = math.nan
    frobenius_err_sq: float = math.nan
    tan_theta_init: float = math.nan
    bound: float = math.nan
    bound_frobenius: float = math.nan
    verdict: bool = False


@dataclass
class ExperimentReport:
    config: dict
    trials: list = field(default_factory=list)
    pass_rate: float = 0.0
    required_rate: float = 0.0
    guaranteed_rate: float = 0.0
    overall_pass: bool = False

    def to_dict(self):
        return {
            "config": self.config,
            "trials": [asdict(t) for t in self.trials],
            "aggregate": {
                "pass_rate": self.pass_rate,
                "required_rate": self.required_rate,
                "guaranteed_rate": self.guaranteed_rate,
                "overall_pass": self.overall_pass,
                "n_records": len(self.trials),
            },
        }

    @classmethod
    def from_dict(cls, d):
        names = {f.name for f in fields(TrialRecord)}
        trials = [
            TrialRecord(**{k: _restore(v) for k, v in t.items() if k in names})
            for t in d.get("trials", [])
        ]
        agg = d.get("aggregate", {})
        return cls(
            config=_restore(d.get("config", {})),
            trials=trials,
            pass_rate=_restore(agg.get("pass_rate", 0.0)),
            required_rate=_restore(agg.get("required_rate", 0.0)),
            guaranteed_rate=_restore(agg.get("guaranteed_rate", 0.0)),
            overall_pass=bool(agg.get("overall_pass", False)),
        )


_NONFINITE = {"inf": math.inf, "-inf": -math.inf, "nan": math.nan}


def _restore(v):
    if isinstance(v, str) and v in _NONFINITE:
        return _NONFINITE[v]
    if isinstance(v, dict):
        return {k: _restore(x) for k, x in v.items()}
    if isinstance(v, list):
        return [_restore(x) for x in v]
    return v


def _encode(v, indent, level):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if v is None:
        return "null"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        if math.isfinite(v):
            text = format(v, ".17g")
            return text if any(c in text for c in ".en") else text + ".0"
        return json.dumps("nan" if math.isnan(v) else ("inf" if v > 0 else "-inf"))
    if isinstance(v, str):
        return json.dumps(v)
    if isinstance(v, dict):
        if not v:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_encode(x, indent, level + 1)}" for k, x in v.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(v, (list, tuple)):
        if not v:
            return "[]"
        items = [pad + _encode(x, indent, level + 1) for x in v]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if hasattr(v, "item"):  # numpy scalar
        return _encode(v.item(), indent, level)
    raise TypeError(f"cannot serialize {type(v).__name__}")


def to_json(report, indent=2):
    """Single JSON object; keys in declaration order, floats with 17 significant
    digits, non-finite floats as the strings ``"inf"``, ``"-inf"``, ``"nan"``."""
    return _encode(report.to_dict(), indent, 0) + "\n"


def from_json(text):
    return ExperimentReport.from_dict(json.loads(text))


def _csv_cell(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format(v, ".17g") if math.isfinite(v) else ("nan" if math.isnan(v) else ("inf" if v > 0 else "-inf"))
    return str(v)


def to_csv(report):
    """Header row plus one row per trial record (CRLF line ends, minimal quoting)."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n", quoting=csv.QUOTE_MINIMAL)
    w.writerow(TRIAL_FIELDS)
    for t in report.trials:
        w.writerow([_csv_cell(getattr(t, f)) for f in TRIAL_FIELDS])
    return buf.getvalue()


def emit_report(report, fmt="json", path=None):
    """Serialize ``report``; write to ``path`` if given, and return the text."""
    if fmt == "json":
        text = to_json(report)
    elif fmt == "csv":
        text = to_csv(report)
    else:
        raise ValueError(f"unknown report format {fmt!r}; expected json or csv")
    if path is not None:
        try:
            with open(path, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            raise ReportIOError(f"cannot write report to {path}: {exc}") from exc
    return text
