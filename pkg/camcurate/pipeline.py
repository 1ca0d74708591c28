"""
Curation pipeline orchestration.

Runs the three curation stages over an on-disk corpus:
1. Filter (smoothness and degenerate-motion checks) -> verdicts.jsonl, filtered_manifest.json
2. Classify against the 50 templates -> labels.jsonl
3. Match trajectories within each class -> pairs.jsonl
and summarizes the run in report.json.

Per-entry failures are recorded instead of aborting the run; a stage
whose error rate exceeds the configured limit raises
DataErrorRateExceeded after its artifacts are written. Work items run on
a process pool and results are sorted by id, so outputs do not depend on
the worker count.
"""

import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from itertools import groupby
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import pandas as pd
from tqdm import tqdm

from .classification import ClassLabel, PreparedTemplate, classify, prepare_templates
from .config import FILTERED_MANIFEST_FILE, LABELS_FILE, PAIRS_FILE, REPORT_FILE, VERDICTS_FILE
from .errors import CamCurateError, DataErrorRateExceeded
from .matching import MatchPair, candidate_pairs, evaluate_pair, prepare_member
from .metrics import Decision, FilterVerdict, filter_trajectory
from .motion_library import MOTION_TYPES, library_templates
from .settings import PipelineConfig
from .trajectory_io import ManifestEntry, load_manifest, load_trajectory, write_jsonl, write_manifest

PathLike = Union[str, Path]


# =============================================================================
# RECORDS
# =============================================================================

@dataclass(frozen=True)
class EntryError:
    """A corpus entry (or candidate pair) that failed in one stage."""

    id: str
    stage: str
    message: str

    def to_dict(self) -> dict:
        return {"id": self.id, "stage": self.stage, "message": self.message}


@dataclass
class FilterStage:
    verdicts: List[FilterVerdict]
    kept: List[ManifestEntry]
    errors: List[EntryError]
    wall_time_s: float


@dataclass
class ClassifyStage:
    labels: List[ClassLabel]
    errors: List[EntryError]
    wall_time_s: float


@dataclass
class MatchStage:
    pairs: List[MatchPair]
    candidates_evaluated: int
    work_items: int
    errors: List[EntryError]
    wall_time_s: float


@dataclass
class PipelineReport:
    """Run summary: decision counts, class histogram and matching statistics."""

    corpus_size: int
    decisions: Dict[str, int]
    errors: List[dict]
    error_rate: float
    class_histogram: Dict[str, int]
    candidates_evaluated: int
    pairs_accepted: int
    acceptance_rate: float
    wall_time_s: Dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "corpus_size": self.corpus_size,
            "decisions": dict(self.decisions),
            "errors": list(self.errors),
            "error_rate": self.error_rate,
            "class_histogram": dict(self.class_histogram),
            "candidates_evaluated": self.candidates_evaluated,
            "pairs_accepted": self.pairs_accepted,
            "acceptance_rate": self.acceptance_rate,
            "wall_time_s": dict(self.wall_time_s),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PipelineReport":
        return cls(**{key: data[key] for key in cls.__dataclass_fields__})


def write_report(report: PipelineReport, out_dir: PathLike) -> Path:
    path = Path(out_dir) / REPORT_FILE
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(report.to_dict(), indent=2) + "\n", encoding="utf-8")
    return path


def load_report(out_dir: PathLike) -> PipelineReport:
    path = Path(out_dir) / REPORT_FILE
    return PipelineReport.from_dict(json.loads(path.read_text(encoding="utf-8")))


# =============================================================================
# WORKER POOL
# =============================================================================

_WORKER_TEMPLATES: Tuple[PreparedTemplate, ...] = ()


def _set_worker_templates(templates: Tuple[PreparedTemplate, ...]) -> None:
    global _WORKER_TEMPLATES
    _WORKER_TEMPLATES = templates


def _run_items(func: Callable, items: Sequence, jobs: int, desc: str, quiet: bool,
               initializer: Optional[Callable] = None, initargs: tuple = ()) -> list:
    """Ordered map of func over items, in-process for jobs == 1."""
    if jobs <= 1 or len(items) <= 1:
        if initializer is not None:
            initializer(*initargs)
        return [func(item) for item in tqdm(items, desc=desc, disable=quiet)]
    chunksize = max(1, len(items) // (jobs * 8))
    with ProcessPoolExecutor(max_workers=jobs, initializer=initializer, initargs=initargs) as pool:
        results = pool.map(func, items, chunksize=chunksize)
        return list(tqdm(results, total=len(items), desc=desc, disable=quiet))


def _check_error_rate(stage: str, errors: Sequence[EntryError], n_items: int, config: PipelineConfig) -> None:
    if n_items == 0 or not errors:
        return
    rate = len(errors) / n_items
    if rate > config.max_error_rate:
        raise DataErrorRateExceeded(stage, rate, config.max_error_rate, errors[0].message)


# =============================================================================
# STAGE 1: FILTER
# =============================================================================

def _filter_worker(entry: ManifestEntry, config: PipelineConfig):
    try:
        traj = load_trajectory(entry.path, entry.id)
        return filter_trajectory(traj, config.filter), None
    except (CamCurateError, OSError) as exc:
        return None, EntryError(entry.id, "filter", str(exc))


def run_filter(entries: Sequence[ManifestEntry], config: PipelineConfig, out_dir: PathLike,
               quiet: bool = False, check_errors: bool = True) -> FilterStage:
    """
    Filter every manifest entry.

    Writes verdicts.jsonl (one verdict per readable entry) and
    filtered_manifest.json (Keep and RotationOnlyKeep entries).

    Raises:
        DataErrorRateExceeded: Too many unreadable entries (after writing outputs)
    """
    start = time.perf_counter()
    out_dir = Path(out_dir)
    entries = sorted(entries, key=lambda e: e.id)
    if not quiet:
        print(f"Filtering {len(entries):,} trajectories...")

    results = _run_items(partial(_filter_worker, config=config), entries, config.jobs, "filter", quiet)
    verdicts = [v for v, _ in results if v is not None]
    errors = [e for _, e in results if e is not None]
    kept_ids = {v.trajectory_id for v in verdicts if v.decision.kept}
    kept = [e for e in entries if e.id in kept_ids]

    write_jsonl(out_dir / VERDICTS_FILE, (v.to_dict() for v in verdicts))
    write_manifest(out_dir / FILTERED_MANIFEST_FILE, kept)
    stage = FilterStage(verdicts, kept, errors, time.perf_counter() - start)

    if not quiet:
        print(f"✓ Filtered {len(verdicts):,} trajectories "
              f"({len(kept):,} kept, {len(verdicts) - len(kept):,} rejected, {len(errors):,} errors)")
    if check_errors:
        _check_error_rate("filter", errors, len(entries), config)
    return stage


# =============================================================================
# STAGE 2: CLASSIFY
# =============================================================================

def _classify_worker(entry: ManifestEntry, config: PipelineConfig):
    try:
        traj = load_trajectory(entry.path, entry.id)
        label = classify(traj, _WORKER_TEMPLATES, config.rot_weight, config.filter,
                         config.ransac, config.resample_k)
        return label, None
    except (CamCurateError, OSError) as exc:
        return None, EntryError(entry.id, "classify", str(exc))


def run_classify(entries: Sequence[ManifestEntry], config: PipelineConfig, out_dir: PathLike,
                 quiet: bool = False, check_errors: bool = True) -> ClassifyStage:
    """
    Classify filtered entries against the templates built from config.template.

    Writes labels.jsonl sorted by trajectory id.
    """
    start = time.perf_counter()
    out_dir = Path(out_dir)
    entries = sorted(entries, key=lambda e: e.id)
    if not quiet:
        print(f"Classifying {len(entries):,} trajectories against {len(MOTION_TYPES)} templates...")

    templates = prepare_templates(library_templates(config.template), config.resample_k)
    results = _run_items(
        partial(_classify_worker, config=config), entries, config.jobs, "classify", quiet,
        initializer=_set_worker_templates, initargs=(templates,),
    )
    labels = [label for label, _ in results if label is not None]
    errors = [e for _, e in results if e is not None]

    write_jsonl(out_dir / LABELS_FILE, (label.to_dict() for label in labels))
    stage = ClassifyStage(labels, errors, time.perf_counter() - start)

    if not quiet:
        n_classes = len({label.class_id for label in labels})
        print(f"✓ Classified {len(labels):,} trajectories into {n_classes} classes ({len(errors):,} errors)")
    if check_errors:
        _check_error_rate("classify", errors, len(entries), config)
    return stage


# =============================================================================
# STAGE 3: MATCH
# =============================================================================

def _match_worker(task: Tuple[int, List[ManifestEntry]], config: PipelineConfig):
    class_id, members = task
    errors, prepared = [], []
    for entry in members:
        try:
            traj = load_trajectory(entry.path, entry.id)
            prepared.append(prepare_member(traj, config.filter, config.resample_k))
        except (CamCurateError, OSError) as exc:
            errors.append(EntryError(entry.id, "match", str(exc)))

    pairs = []
    candidates = candidate_pairs(len(prepared), config.match.n_candidates, config.seed, class_id)
    for i, j in candidates:
        a, b = prepared[i], prepared[j]
        try:
            pair = evaluate_pair(a, b, config.match, class_id, config.ransac)
        except CamCurateError as exc:
            errors.append(EntryError(f"{a.id}|{b.id}", "match", str(exc)))
            continue
        if pair is not None:
            pairs.append(pair)
    return class_id, len(candidates), pairs, errors


def run_match(labels: Sequence[ClassLabel], entries: Sequence[ManifestEntry], config: PipelineConfig,
              out_dir: PathLike, quiet: bool = False, check_errors: bool = True) -> MatchStage:
    """
    Random pairwise matching inside each class.

    Each class draws up to config.match.n_candidates pairs from a
    generator seeded with (config.seed, class_id). Writes pairs.jsonl
    sorted by (id_a, id_b).
    """
    start = time.perf_counter()
    out_dir = Path(out_dir)
    by_id = {e.id: e for e in entries}
    errors = [
        EntryError(label.trajectory_id, "match", "label has no manifest entry")
        for label in labels if label.trajectory_id not in by_id
    ]
    ordered = sorted(
        (label for label in labels if label.trajectory_id in by_id),
        key=lambda label: (label.class_id, label.trajectory_id),
    )
    tasks = [
        (class_id, [by_id[label.trajectory_id] for label in group])
        for class_id, group in groupby(ordered, key=lambda label: label.class_id)
    ]
    if not quiet:
        print(f"Matching within {len(tasks)} classes "
              f"(up to {config.match.n_candidates:,} candidates each)...")

    results = _run_items(partial(_match_worker, config=config), tasks, config.jobs, "match", quiet)
    pairs, evaluated = [], 0
    for _, n_candidates, class_pairs, class_errors in results:
        evaluated += n_candidates
        pairs.extend(class_pairs)
        errors.extend(class_errors)
    pairs.sort(key=lambda p: (p.id_a, p.id_b))

    write_jsonl(out_dir / PAIRS_FILE, (p.to_dict() for p in pairs))
    work_items = len(labels) + evaluated
    stage = MatchStage(pairs, evaluated, work_items, errors, time.perf_counter() - start)

    if not quiet:
        print(f"✓ Accepted {len(pairs):,} of {evaluated:,} candidate pairs ({len(errors):,} errors)")
    if check_errors:
        _check_error_rate("match", errors, work_items, config)
    return stage


# =============================================================================
# FULL RUN
# =============================================================================

def build_report(corpus_size: int, filter_stage: Optional[FilterStage] = None,
                 classify_stage: Optional[ClassifyStage] = None,
                 match_stage: Optional[MatchStage] = None) -> PipelineReport:
    """Summarize whichever stages have run."""
    verdicts = filter_stage.verdicts if filter_stage else []
    decision_counts = pd.Series([v.decision.value for v in verdicts], dtype=object).value_counts()
    decisions = {d.value: int(decision_counts.get(d.value, 0)) for d in Decision}

    labels = classify_stage.labels if classify_stage else []
    class_counts = pd.Series([label.class_id for label in labels], dtype="int64").value_counts()
    histogram = {mt.name: int(class_counts.get(mt.class_id, 0)) for mt in MOTION_TYPES}

    stages = [s for s in (filter_stage, classify_stage, match_stage) if s is not None]
    errors = [e.to_dict() for s in stages for e in s.errors]
    evaluated = match_stage.candidates_evaluated if match_stage else 0
    accepted = len(match_stage.pairs) if match_stage else 0
    wall = {name: round(s.wall_time_s, 3) for name, s in
            (("filter", filter_stage), ("classify", classify_stage), ("match", match_stage)) if s is not None}
    wall["total"] = round(sum(wall.values()), 3)

    return PipelineReport(
        corpus_size=corpus_size,
        decisions=decisions,
        errors=errors,
        error_rate=len(errors) / corpus_size if corpus_size else 0.0,
        class_histogram=histogram,
        candidates_evaluated=evaluated,
        pairs_accepted=accepted,
        acceptance_rate=accepted / evaluated if evaluated else 0.0,
        wall_time_s=wall,
    )


def run_all(manifest_path: PathLike, config: PipelineConfig, out_dir: PathLike,
            quiet: bool = False) -> PipelineReport:
    """
    Run filter, classify and match in order and write report.json.

    When a stage exceeds the error-rate limit the report covers the
    stages completed so far and DataErrorRateExceeded is raised.
    """
    out_dir = Path(out_dir)
    entries = load_manifest(manifest_path)
    if not quiet:
        print(f"Running pipeline on {len(entries):,} trajectories ({config.jobs} worker(s))")

    filter_stage = classify_stage = match_stage = None
    try:
        filter_stage = run_filter(entries, config, out_dir, quiet, check_errors=False)
        _check_error_rate("filter", filter_stage.errors, len(entries), config)

        classify_stage = run_classify(filter_stage.kept, config, out_dir, quiet, check_errors=False)
        _check_error_rate("classify", classify_stage.errors, len(filter_stage.kept), config)

        match_stage = run_match(classify_stage.labels, filter_stage.kept, config, out_dir, quiet,
                                check_errors=False)
        _check_error_rate("match", match_stage.errors, match_stage.work_items, config)
    finally:
        report = build_report(len(entries), filter_stage, classify_stage, match_stage)
        path = write_report(report, out_dir)

    if not quiet:
        print(f"✓ Report written to {path}")
    return report
