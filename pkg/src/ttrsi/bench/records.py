"""Result records and their CSV/JSON serialization."""
import csv
import dataclasses
import io
import json
import time
from dataclasses import dataclass, field

CSV_FIELDS = (
    "experiment", "method", "n", "d", "chi_in", "chi_out", "k", "p", "eps_id", "seed",
    "rel_error", "z_dev", "t_sketch_ns", "t_iter_ns", "t_kron_ns", "t_round_ns",
)

_INT_FIELDS = {"n", "d", "chi_in", "chi_out", "k", "p", "seed", "t_sketch_ns", "t_iter_ns", "t_kron_ns", "t_round_ns"}
_FLOAT_FIELDS = {"eps_id", "rel_error", "z_dev"}
METHODS = ("rsi", "direct")


@dataclass
class ExperimentRecord:
    """One (method, parameter point, seed) measurement.

    ``None`` marks a quantity that does not apply or could not be computed.
    ``timestamp`` and ``timing_trusted`` are bookkeeping: they are left out of
    equality and of the CSV columns.
    """

    experiment: str
    method: str
    n: int
    d: int
    chi_in: int
    chi_out: int
    k: int = None
    p: int = None
    eps_id: float = None
    seed: int = None
    rel_error: float = None
    z_dev: float = None
    t_sketch_ns: int = None
    t_iter_ns: int = None
    t_kron_ns: int = None
    t_round_ns: int = None
    timestamp: float = field(default_factory=time.time, compare=False)
    timing_trusted: bool = field(default=True, compare=False)

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}, got {self.method!r}")

    @property
    def runtime_ns(self):
        parts = [self.t_sketch_ns, self.t_iter_ns, self.t_kron_ns, self.t_round_ns]
        parts = [t for t in parts if t is not None]
        return sum(parts) if parts else None

    def row(self):
        return {name: _fmt(getattr(self, name)) for name in CSV_FIELDS}


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _parse(name, text):
    if text == "":
        return None
    if name in _INT_FIELDS:
        return int(text)
    if name in _FLOAT_FIELDS:
        return float(text)
    return text


def records_to_csv(records):
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    writer.writeheader()
    for rec in records:
        writer.writerow(rec.row())
    return buf.getvalue()


def records_from_csv(text):
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != CSV_FIELDS:
        raise ValueError(f"unexpected CSV header {reader.fieldnames}")
    return [ExperimentRecord(**{k: _parse(k, v) for k, v in row.items()}) for row in reader]


def records_to_json(records):
    return json.dumps([dataclasses.asdict(r) for r in records], indent=1) + "\n"


def records_from_json(text):
    return [ExperimentRecord(**item) for item in json.loads(text)]
