"""Monte Carlo block-error-rate and guesswork measurement.

Trial ``t`` of grid point ``i`` always draws its message and noise from the
stream keyed by ``(seed, i, t)`` (see :mod:`sygrand.streams`). Two decoders
run with the same seed therefore see identical channels, and a point's
result is independent of batch sizes and worker counts: trials are
processed in order and the run stops exactly at the trial where the
stopping rule fires.
"""

from __future__ import annotations

import csv
import functools
import io
import json
import math
from dataclasses import asdict, dataclass, field

import numba
import numpy as np
from scipy import stats

from . import _kernels as K
from .channel import noise_sigma2
from .codes import LinearCode
from .decoder import DecodeOutcome, DecoderConfig, Status, Variant
from .bitlinalg import BitVector

CSV_HEADER = ("code,decoder,params,ebn0_db,trials,block_errors,bler,bler_ci_low,"
              "bler_ci_high,avg_queries,avg_queries_first_candidate,avg_list_size,"
              "abandon_rate,log2_ratio_vs_ref,seed").split(",")

_UNPAIRED_SALT = 0x5DEECE66D
_STATUS_ORDER = list(Status)


# ---------------------------------------------------------------------------
# kernel plumbing


@dataclass(frozen=True)
class KernelCode:
    n: int
    k: int
    cols: np.ndarray
    col_keys: np.ndarray
    col_pos: np.ndarray
    g_rows: np.ndarray
    even_weight: bool

    @property
    def nwords(self) -> int:
        return self.g_rows.shape[1]


@functools.lru_cache(maxsize=32)
def kernel_code(code: LinearCode) -> KernelCode:
    if code.n - code.k > 64:
        raise ValueError(f"compiled kernel needs n - k <= 64, got {code.n - code.k}")
    cols = np.array(code.H.col_bits, dtype=np.uint64)
    order = np.argsort(cols, kind="stable")
    g_rows = np.stack([BitVector(code.n, r).to_words() for r in code.G.row_bits])
    return KernelCode(code.n, code.k, cols, cols[order].copy(), order.astype(np.int64),
                      g_rows, code.even_weight)


def _config_args(config: DecoderConfig):
    variant = {Variant.ORBGRAND: K.ORBGRAND, Variant.SYGRAND: K.SYGRAND,
               Variant.ORDEPT: K.ORDEPT}[config.variant]
    limit = config.l_max if config.variant is Variant.SYGRAND else config.c_max
    return (variant, float(config.theta), -1 if limit is None else int(limit),
            int(config.t_budget), int(config.max_queries))


def _set_workers(workers: int) -> int:
    workers = max(1, min(int(workers), numba.config.NUMBA_NUM_THREADS))
    numba.set_num_threads(workers)
    return workers


def kernel_decode(code: LinearCode, llr, config: DecoderConfig,
                  truth: BitVector | None = None) -> tuple[DecodeOutcome, bool]:
    """Decode one LLR vector with the compiled kernel.

    Returns the outcome (without candidate entries) and whether ``truth``
    is in the final list.
    """
    kc = kernel_code(code)
    variant, theta, limit, t_budget, max_q = _config_args(config)
    out = np.zeros(kc.nwords, dtype=np.uint64)
    tw = truth.to_words() if truth is not None else np.zeros(0, dtype=np.uint64)
    empty_f = np.zeros(0)
    q, qf, ls, st, ph, il, _, bad = K.decode_one(
        np.asarray(llr, dtype=np.float64), kc.n, kc.k, kc.cols, kc.col_keys, kc.col_pos,
        kc.even_weight, config.use_parity_constraint, variant, theta, limit, t_budget,
        max_q, tw, out, empty_f, np.zeros(0, dtype=np.bool_), np.zeros(0, dtype=np.int64))
    if bad:
        raise AssertionError(f"kernel produced {bad} non-codeword list entries")
    bits = int.from_bytes(out.astype("<u8").tobytes(), "little")
    outcome = DecodeOutcome(BitVector(code.n, bits), int(q), _STATUS_ORDER[st], int(ls),
                            float(ph), None if qf < 0 else int(qf))
    return outcome, bool(il)


@dataclass
class Batch:
    """Per-trial outputs for a contiguous range of trials."""

    err: np.ndarray
    queries: np.ndarray
    q_first: np.ndarray
    list_size: np.ndarray
    status: np.ndarray
    p_hat: np.ndarray
    in_list: np.ndarray
    words: np.ndarray
    trace_p: np.ndarray
    trace_ok: np.ndarray
    trace_q: np.ndarray
    n_events: np.ndarray
    n_invalid: np.ndarray

    def __len__(self):
        return self.err.size


def run_batch(code: LinearCode, config: DecoderConfig, ebn0_db: float, seed: int,
              point: int, start: int, count: int, keep_words: bool = False,
              trace_cap: int = 0, workers: int = 1) -> Batch:
    kc = kernel_code(code)
    variant, theta, limit, t_budget, max_q = _config_args(config)
    b = Batch(
        err=np.zeros(count, dtype=np.bool_),
        queries=np.zeros(count, dtype=np.int64),
        q_first=np.zeros(count, dtype=np.int64),
        list_size=np.zeros(count, dtype=np.int64),
        status=np.zeros(count, dtype=np.int8),
        p_hat=np.zeros(count),
        in_list=np.zeros(count, dtype=np.bool_),
        words=np.zeros((count if keep_words else 0, kc.nwords), dtype=np.uint64),
        trace_p=np.full((count, trace_cap), np.inf),
        trace_ok=np.zeros((count, trace_cap), dtype=np.bool_),
        trace_q=np.zeros((count, trace_cap), dtype=np.int64),
        n_events=np.zeros(count, dtype=np.int64),
        n_invalid=np.zeros(count, dtype=np.int64),
    )
    fn = K.batch_parallel if _set_workers(workers) > 1 else K.batch_serial
    fn(kc.n, kc.k, kc.cols, kc.col_keys, kc.col_pos, kc.g_rows, kc.even_weight,
       config.use_parity_constraint, variant, theta, limit, t_budget, max_q,
       noise_sigma2(code.rate, ebn0_db), np.uint64(seed), np.uint64(point), np.uint64(start),
       b.err, b.queries, b.q_first, b.list_size, b.status, b.p_hat, b.in_list,
       b.words, b.trace_p, b.trace_ok, b.trace_q, b.n_events, b.n_invalid)
    return b


def channel_batch(code: LinearCode, ebn0_db: float, seed: int, point: int,
                  start: int, count: int) -> tuple[np.ndarray, np.ndarray]:
    """Transmitted codewords (``count x n`` bits) and LLRs for a trial range,
    drawn from the same streams as :func:`run_batch`."""
    kc = kernel_code(code)
    bits = np.zeros((count, code.n), dtype=np.uint8)
    llrs = np.zeros((count, code.n))
    K.channel_batch(kc.n, kc.k, kc.g_rows, noise_sigma2(code.rate, ebn0_db),
                    np.uint64(seed), np.uint64(point), np.uint64(start), bits, llrs)
    return bits, llrs


def ml_decode_batch(code: LinearCode, llrs: np.ndarray) -> np.ndarray:
    """Exhaustive maximum-likelihood decoding over all ``2**k`` codewords."""
    book = np.array([c.to_array() for c in code.codewords()], dtype=np.float64)
    scores = np.asarray(llrs) @ (1.0 - 2.0 * book).T
    return book[np.argmax(scores, axis=1)].astype(np.uint8)


# ---------------------------------------------------------------------------
# points


@dataclass(frozen=True)
class StoppingRule:
    min_block_errors: int = 100
    max_trials: int = 10**7
    first_batch: int = 2048
    max_batch: int = 1 << 16

    def __post_init__(self):
        if self.min_block_errors < 1:
            raise ValueError("min_block_errors must be >= 1")
        if self.max_trials < 1:
            raise ValueError("max_trials must be >= 1")


def wilson_interval(errors: int, trials: int, confidence: float = 0.95) -> tuple[float, float]:
    if trials == 0:
        return 0.0, 1.0
    ci = stats.binomtest(int(errors), int(trials)).proportion_ci(confidence, method="wilson")
    return float(ci.low), float(ci.high)


@dataclass
class SimPoint:
    ebn0_db: float
    trials: int = 0
    block_errors: int = 0
    sum_queries: int = 0
    sum_queries_sq: int = 0
    sum_queries_first: int = 0
    sum_list_size: int = 0
    abandoned: int = 0

    @property
    def bler(self) -> float:
        return self.block_errors / self.trials if self.trials else 0.0

    @property
    def ci(self) -> tuple[float, float]:
        return wilson_interval(self.block_errors, self.trials)

    @property
    def bler_se(self) -> float:
        p = self.bler
        return math.sqrt(p * (1 - p) / self.trials) if self.trials else 0.0

    @property
    def avg_queries(self) -> float:
        return self.sum_queries / self.trials if self.trials else 0.0

    @property
    def queries_se(self) -> float:
        if self.trials < 2:
            return 0.0
        mean = self.avg_queries
        var = (self.sum_queries_sq - self.trials * mean * mean) / (self.trials - 1)
        return math.sqrt(max(var, 0.0) / self.trials)

    @property
    def avg_queries_first(self) -> float:
        return self.sum_queries_first / self.trials if self.trials else 0.0

    @property
    def avg_list_size(self) -> float:
        return self.sum_list_size / self.trials if self.trials else 0.0

    @property
    def abandon_rate(self) -> float:
        return self.abandoned / self.trials if self.trials else 0.0

    def absorb(self, err, queries, q_first, list_size, abandoned) -> None:
        q = queries.astype(np.int64)
        self.trials += int(err.size)
        self.block_errors += int(np.count_nonzero(err))
        self.sum_queries += int(q.sum())
        self.sum_queries_sq += int(np.dot(q, q))
        self.sum_queries_first += int(np.where(q_first < 0, q, q_first).sum())
        self.sum_list_size += int(list_size.sum())
        self.abandoned += int(np.count_nonzero(abandoned))


def _cut(err: np.ndarray, have_errors: int, have_trials: int, rule: StoppingRule) -> int:
    """Number of trials of this batch to keep under ``rule``."""
    keep = min(err.size, rule.max_trials - have_trials)
    need = rule.min_block_errors - have_errors
    cum = np.cumsum(err[:keep], dtype=np.int64)
    hit = np.searchsorted(cum, need)  # first index where cum >= need
    return int(min(keep, hit + 1))


def _batch_sizes(rule: StoppingRule):
    size = rule.first_batch
    while True:
        yield size
        size = min(2 * size, rule.max_batch)


@dataclass
class PointSamples:
    """Per-trial soft-output data kept by ``run_point(collect=True)``."""

    p_hat: np.ndarray
    in_list: np.ndarray
    err: np.ndarray
    list_size: np.ndarray


def run_point(code: LinearCode, config: DecoderConfig, ebn0_db: float,
              rule: StoppingRule | None = None, seed: int = 1, point: int = 0,
              workers: int = 1, collect: bool = False):
    """Simulate one Eb/N0 point. Returns a :class:`SimPoint`, or
    ``(SimPoint, PointSamples)`` when ``collect`` is set."""
    rule = rule or StoppingRule()
    sp = SimPoint(float(ebn0_db))
    kept: list[Batch] = []
    sizes = _batch_sizes(rule)
    while sp.block_errors < rule.min_block_errors and sp.trials < rule.max_trials:
        b = run_batch(code, config, ebn0_db, seed, point, sp.trials, next(sizes), workers=workers)
        m = _cut(b.err, sp.block_errors, sp.trials, rule)
        sp.absorb(b.err[:m], b.queries[:m], b.q_first[:m], b.list_size[:m],
                  b.status[:m] == K.ABANDONED)
        if collect:
            kept.append(PointSamples(b.p_hat[:m], b.in_list[:m], b.err[:m], b.list_size[:m]))
    if not collect:
        return sp
    samples = PointSamples(*(np.concatenate([getattr(s, f) for s in kept])
                             for f in ("p_hat", "in_list", "err", "list_size")))
    return sp, samples


def run_trials(code: LinearCode, config: DecoderConfig, ebn0_db: float, trials: int,
               seed: int = 1, point: int = 0, keep_words: bool = False,
               workers: int = 1, batch: int = 1 << 16) -> Batch:
    """Fixed number of trials with every per-trial output retained."""
    parts = [run_batch(code, config, ebn0_db, seed, point, start, min(batch, trials - start),
                       keep_words=keep_words, workers=workers)
             for start in range(0, trials, batch)]
    return Batch(*(np.concatenate([getattr(p, f) for p in parts])
                   for f in Batch.__dataclass_fields__))


# ---------------------------------------------------------------------------
# sweeps


@dataclass
class SweepResult:
    code: str
    decoder: str
    params: str
    seed: int
    points: list[SimPoint]
    ref_decoder: str | None = None
    ref_params: str | None = None
    ref_points: list[SimPoint] | None = None
    ref_seed: int | None = None

    @property
    def log2_ratios(self) -> list[float] | None:
        if self.ref_points is None:
            return None
        return [math.log2(p.avg_queries / r.avg_queries)
                for p, r in zip(self.points, self.ref_points)]


def parse_grid(text: str) -> list[float]:
    """``"a:s:b"`` (inclusive) or a comma list."""
    if ":" in text:
        a, s, b = (float(x) for x in text.split(":"))
        if s <= 0:
            raise ValueError("grid step must be positive")
        count = int(math.floor((b - a) / s + 1e-9)) + 1
        return [round(a + i * s, 10) for i in range(count)]
    return [float(x) for x in text.split(",") if x.strip()]


def sweep(code: LinearCode, config: DecoderConfig, grid, rule: StoppingRule | None = None,
          seed: int = 1, reference: DecoderConfig | None = None, paired: bool = True,
          workers: int = 1) -> SweepResult:
    grid = list(grid)
    if not grid:
        raise ValueError("empty Eb/N0 grid")
    rule = rule or StoppingRule()
    pts = [run_point(code, config, e, rule, seed, i, workers) for i, e in enumerate(grid)]
    result = SweepResult(str(code), config.variant.value, config.describe(), seed, pts)
    if reference is not None:
        ref_seed = seed if paired else seed ^ _UNPAIRED_SALT
        result.ref_points = [run_point(code, reference, e, rule, ref_seed, i, workers)
                             for i, e in enumerate(grid)]
        result.ref_decoder = reference.variant.value
        result.ref_params = reference.describe()
        result.ref_seed = ref_seed
    return result


# ---------------------------------------------------------------------------
# parameter optimisation


def derive_outcomes(b: Batch, theta: float, l_max: int) -> tuple[np.ndarray, ...]:
    """Per-trial outcome of SyGRAND(theta, l_max) from a trace recorded with
    SyGRAND(0, cap), ``l_max <= cap``.

    Both decoders issue the same queries until the first list insertion at
    which the estimate falls to ``theta`` or the list reaches ``l_max``, so
    the shorter run is a prefix of the traced one.
    """
    cap = b.trace_p.shape[1]
    if l_max > cap:
        raise ValueError(f"l_max={l_max} exceeds trace capacity {cap}")
    idx = np.arange(cap)
    valid = idx[None, :] < b.n_events[:, None]
    by_theta = (b.trace_p <= theta) & valid
    stop = by_theta | (valid & (idx[None, :] + 1 >= l_max))
    has = stop.any(axis=1)
    first = np.argmax(stop, axis=1)
    rows = np.arange(len(b))
    err = np.where(has, ~b.trace_ok[rows, first], b.err)
    queries = np.where(has, b.trace_q[rows, first], b.queries)
    list_size = np.where(has, first + 1, b.list_size)
    abandoned = np.where(has, False, b.status == K.ABANDONED)
    return err, queries, b.q_first, list_size, abandoned


def evaluate_theta_grid(code: LinearCode, configs: list[tuple[float, int]], ebn0_db: float,
                        rule: StoppingRule, seed: int, point: int, base: DecoderConfig,
                        workers: int = 1) -> list[SimPoint]:
    """SimPoints for several SyGRAND (theta, l_max) settings from one traced
    run; each equals what :func:`run_point` returns for that setting."""
    cap = max(l for _, l in configs)
    tracer = DecoderConfig.sygrand(0.0, cap, max_queries=base.max_queries,
                                   use_parity_constraint=base.use_parity_constraint)
    pts = [SimPoint(float(ebn0_db)) for _ in configs]
    open_ = [True] * len(configs)
    start = 0
    sizes = _batch_sizes(rule)
    while any(open_):
        b = run_batch(code, tracer, ebn0_db, seed, point, start, next(sizes),
                      trace_cap=cap, workers=workers)
        start += len(b)
        for i, (theta, l_max) in enumerate(configs):
            if not open_[i]:
                continue
            sp = pts[i]
            err, q, qf, ls, ab = derive_outcomes(b, theta, l_max)
            m = _cut(err, sp.block_errors, sp.trials, rule)
            sp.absorb(err[:m], q[:m], qf[:m], ls[:m], ab[:m])
            open_[i] = sp.block_errors < rule.min_block_errors and sp.trials < rule.max_trials
    return pts


class OptimizationError(RuntimeError):
    pass


@dataclass
class OptimizationResult:
    l_max: int
    theta: float
    reference: list[SimPoint]
    evidence: list[dict] = field(default_factory=list)

    def table(self) -> str:
        lines = ["stage param ebn0_db bler ref_bler ref_ci_high admissible"]
        for row in self.evidence:
            lines.append(f"{row['stage']} {row['param']} {row['ebn0_db']:g} "
                         f"{row['bler']:.6g} {row['ref_bler']:.6g} "
                         f"{row['ref_ci_high']:.6g} {row['admissible']}")
        return "\n".join(lines)


def dominates(candidate: SimPoint, reference: SimPoint) -> bool:
    """BLER point estimate no worse than the reference's Wilson upper bound."""
    return candidate.bler <= reference.ci[1]


def optimize_parameters(code: LinearCode, reference: DecoderConfig, grid,
                        rule: StoppingRule | None = None, seed: int = 1,
                        l_cap: int = 16, theta_step: float = 0.01,
                        base: DecoderConfig | None = None, workers: int = 1,
                        reference_points: list[SimPoint] | None = None) -> OptimizationResult:
    """Two one-dimensional searches: smallest list size with ``theta = 0``
    that matches the reference BLER everywhere, then the largest ``theta``
    that keeps matching it at that list size."""
    grid = list(grid)
    rule = rule or StoppingRule()
    base = base or DecoderConfig.sygrand(0.0, 1)
    ref_pts = reference_points or [run_point(code, reference, e, rule, seed, i, workers)
                                   for i, e in enumerate(grid)]
    evidence = []

    def record(stage, param, pts):
        ok = True
        for sp, rp in zip(pts, ref_pts):
            good = dominates(sp, rp)
            ok &= good
            evidence.append(dict(stage=stage, param=param, ebn0_db=sp.ebn0_db, bler=sp.bler,
                                 ref_bler=rp.bler, ref_ci_high=rp.ci[1], admissible=good))
        return ok

    l_values = list(range(1, l_cap + 1))
    per_point = [evaluate_theta_grid(code, [(0.0, l) for l in l_values], e, rule, seed, i,
                                     base, workers) for i, e in enumerate(grid)]
    l_star = None
    for j, l in enumerate(l_values):
        if record(1, f"lmax={l}", [pp[j] for pp in per_point]):
            l_star = l
            break
    if l_star is None:
        bad = [e["ebn0_db"] for e in evidence if e["param"] == f"lmax={l_cap}" and not e["admissible"]]
        raise OptimizationError(f"no list size up to {l_cap} matches the reference; "
                                f"violations at Eb/N0 = {bad} dB")

    steps = int(round(1.0 / theta_step))
    thetas = [round(1.0 - i * theta_step, 10) for i in range(steps + 1)]
    per_point = [evaluate_theta_grid(code, [(t, l_star) for t in thetas], e, rule, seed, i,
                                     base, workers) for i, e in enumerate(grid)]
    theta_star = None
    for j, t in enumerate(thetas):
        if record(2, f"theta={t:g}", [pp[j] for pp in per_point]):
            theta_star = t
            break
    # theta = 0 at l_star passed stage 1, so some theta is always admissible
    assert theta_star is not None
    return OptimizationResult(l_star, theta_star, ref_pts, evidence)


# ---------------------------------------------------------------------------
# output


def _fmt(x: float) -> str:
    return f"{x:.6g}"


def result_rows(result: SweepResult) -> list[dict]:
    rows = []
    ratios = result.log2_ratios

    def add(decoder, params, pts, seed, ratio_list):
        for i, p in enumerate(pts):
            lo, hi = p.ci
            rows.append(dict(
                code=result.code, decoder=decoder, params=params, ebn0_db=p.ebn0_db,
                trials=p.trials, block_errors=p.block_errors, bler=p.bler,
                bler_ci_low=lo, bler_ci_high=hi, avg_queries=p.avg_queries,
                avg_queries_first_candidate=p.avg_queries_first,
                avg_list_size=p.avg_list_size, abandon_rate=p.abandon_rate,
                log2_ratio_vs_ref=None if ratio_list is None else ratio_list[i],
                seed=seed))

    add(result.decoder, result.params, result.points, result.seed, ratios)
    if result.ref_points is not None:
        add(result.ref_decoder, result.ref_params, result.ref_points, result.ref_seed, None)
    return rows


def emit_results(result: SweepResult | None) -> tuple[str, str]:
    """CSV text and a JSON report carrying the same fields."""
    rows = result_rows(result) if result is not None else []
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in rows:
        writer.writerow([_fmt(v) if isinstance(v, float) else ("" if v is None else v)
                         for v in (r[h] for h in CSV_HEADER)])
    report = json.dumps({"rows": rows}, indent=2)
    return buf.getvalue(), report


_INT_FIELDS = {"trials", "block_errors", "seed"}
_STR_FIELDS = {"code", "decoder", "params"}


def parse_results(text: str) -> list[dict]:
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames != CSV_HEADER:
        raise ValueError(f"unexpected CSV header: {reader.fieldnames}")
    rows = []
    for rec in reader:
        row = {}
        for key, val in rec.items():
            if key in _STR_FIELDS:
                row[key] = val
            elif key in _INT_FIELDS:
                row[key] = int(val)
            else:
                row[key] = None if val == "" else float(val)
        rows.append(row)
    return rows


def write_results(result: SweepResult, path: str) -> None:
    csv_text, report = emit_results(result)
    try:
        with open(path, "w") as fh:
            fh.write(csv_text)
        with open(path.rsplit(".", 1)[0] + ".json", "w") as fh:
            fh.write(report)
    except OSError as exc:
        raise OSError(f"cannot write results to {path}: {exc}") from exc


# ---------------------------------------------------------------------------
# soft-output calibration


@dataclass(frozen=True)
class CalibrationBucket:
    low: float
    high: float
    count: int
    predicted: float
    empirical: float


def calibration_table(predicted_success, success, bins: int = 10) -> list[CalibrationBucket]:
    """Bucket trials by predicted success probability into equal-width bins."""
    p = np.asarray(predicted_success, dtype=np.float64)
    s = np.asarray(success, dtype=np.float64)
    edges = np.linspace(0.0, 1.0, bins + 1)
    which = np.clip(np.searchsorted(edges, p, side="right") - 1, 0, bins - 1)
    out = []
    for b in range(bins):
        sel = which == b
        cnt = int(sel.sum())
        out.append(CalibrationBucket(float(edges[b]), float(edges[b + 1]), cnt,
                                     float(p[sel].mean()) if cnt else math.nan,
                                     float(s[sel].mean()) if cnt else math.nan))
    return out


def point_dict(p: SimPoint) -> dict:
    d = asdict(p)
    d.update(bler=p.bler, ci=p.ci, avg_queries=p.avg_queries)
    return d
