"""Experiment configs, feature pipelines, and end-to-end runs.

A run is described by a flat ``key = value`` config file: corpus paths, one
of four feature modes (averaged word vectors, DMD, delay-embedded DMD,
precomputed sentence vectors), an optional random-feature lift, and one of
four classifiers.  Running an experiment trains on the train corpus,
evaluates on the test corpus, and writes a metrics report, the model file,
and a manifest with every seed, hyperparameter, and input checksum, so a
run can be reproduced bit-exactly.

The test corpus is only touched by the final evaluation; in particular the
median-heuristic bandwidth is fitted on training features alone.
"""

from __future__ import annotations

import hashlib
import json
import os
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .corpus import LabeledCorpus, default_stopwords, load_olid_tsv, load_stopwords, tokenize_clean
from .dmd import HodmdConfig, sentence_feature
from .embed import (
    PrecomputedTable,
    WordVectorTable,
    average_embedding,
    load_precomputed,
    load_vec_table,
    token_matrix,
)
from .errors import DataError
from .evaluation import MetricsReport, evaluate, labels_to_signs, render_report
from .learn import FeatureMatrix, train_gnb, train_linear_svm, train_logreg, train_rlsc
from .model_io import save_model
from .rks import PRNG_ID, median_heuristic_sigma, sample_map, transform

__all__ = [
    "RksSpec",
    "ExperimentConfig",
    "parse_config",
    "load_corpora",
    "FeaturePipeline",
    "build_pipeline",
    "ExperimentResult",
    "run_experiment",
    "export_feature_lines",
]

FEATURE_KINDS = ("avg", "dmd", "hodmd", "precomputed")
CLASSIFIER_KINDS = ("rlsc", "svm", "logreg", "gnb")

_HODMD_RE = re.compile(r"^hodmd\((\d+)\)$")


@dataclass(frozen=True)
class RksSpec:
    """Random-feature lift: output dim, bandwidth (None = median heuristic), seed."""

    dim: int
    sigma: float | None = None
    seed: int = 0


@dataclass(frozen=True)
class ExperimentConfig:
    name: str
    train_tsv: Path
    test_tsv: Path
    feature: str
    classifier: str
    out_dir: Path
    test_labels: Path | None = None
    vec_file: Path | None = None
    precomputed_file: Path | None = None
    stopwords_file: Path | None = None
    hodmd_d: int = 1
    r_max: int = 10
    sv_rel_tol: float = 1e-10
    rks: RksSpec | None = None
    lam: float = 1e-3
    C: float = 1000.0
    svm_epochs: int = 200
    lr: float = 0.1
    logreg_epochs: int = 500
    l2: float = 1e-3
    var_floor: float = 1e-9
    seed: int = 0

    def validate(self) -> None:
        if self.feature not in FEATURE_KINDS:
            raise DataError(f"unknown feature kind {self.feature!r}")
        if self.classifier not in CLASSIFIER_KINDS:
            raise DataError(f"unknown classifier {self.classifier!r}")
        if self.feature == "precomputed":
            if self.precomputed_file is None:
                raise DataError("feature 'precomputed' needs precomputed_file")
        elif self.vec_file is None:
            raise DataError(f"feature {self.feature!r} needs vec_file")
        if self.rks is not None:
            if self.rks.dim < 2 or self.rks.dim % 2 != 0:
                raise DataError(f"rks_dim must be even and >= 2, got {self.rks.dim}")
            if self.classifier == "gnb":
                raise DataError("the random-feature lift requires a linear classifier")

    def input_paths(self) -> dict[str, Path]:
        paths = {"train_tsv": self.train_tsv, "test_tsv": self.test_tsv}
        for key in ("test_labels", "vec_file", "precomputed_file", "stopwords_file"):
            value = getattr(self, key)
            if value is not None:
                paths[key] = value
        return paths

    def check_inputs_exist(self) -> None:
        for key, path in self.input_paths().items():
            if not Path(path).is_file():
                raise DataError(f"{key}: no such file {path}")


_CONFIG_KEYS = {
    "name",
    "train_tsv",
    "test_tsv",
    "test_labels",
    "vec_file",
    "precomputed_file",
    "stopwords",
    "feature",
    "r_max",
    "sv_rel_tol",
    "rks_dim",
    "rks_sigma",
    "rks_seed",
    "classifier",
    "lambda",
    "C",
    "svm_epochs",
    "lr",
    "logreg_epochs",
    "l2",
    "var_floor",
    "seed",
    "out_dir",
}


def parse_config(path) -> ExperimentConfig:
    """Read a flat ``key = value`` config file (#-comments, blank lines ok).

    Relative paths are resolved against the config file's directory.
    """
    path = Path(path)
    raw: dict[str, str] = {}
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read config {path}: {exc}") from exc
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise DataError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
        key, _, value = stripped.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _CONFIG_KEYS:
            raise DataError(f"{path}:{lineno}: unknown key {key!r}")
        if key in raw:
            raise DataError(f"{path}:{lineno}: duplicate key {key!r}")
        raw[key] = value

    base = path.parent

    def path_of(key: str) -> Path | None:
        if key not in raw:
            return None
        return (base / raw[key]).resolve() if not Path(raw[key]).is_absolute() else Path(raw[key])

    def number(key: str, default, convert):
        if key not in raw:
            return default
        try:
            return convert(raw[key])
        except ValueError:
            raise DataError(f"{path}: key {key!r}: invalid value {raw[key]!r}") from None

    for required in ("train_tsv", "test_tsv", "feature", "classifier"):
        if required not in raw:
            raise DataError(f"{path}: missing required key {required!r}")

    feature = raw["feature"]
    hodmd_d = 1
    match = _HODMD_RE.match(feature)
    if match:
        feature = "hodmd"
        hodmd_d = int(match.group(1))
        if hodmd_d < 1:
            raise DataError(f"{path}: hodmd order must be >= 1")
    elif feature == "dmd":
        hodmd_d = 1

    rks = None
    if "rks_dim" in raw:
        sigma_raw = raw.get("rks_sigma", "median")
        if sigma_raw == "median":
            sigma = None
        else:
            try:
                sigma = float(sigma_raw)
            except ValueError:
                raise DataError(f"{path}: rks_sigma must be 'median' or a number") from None
            if sigma <= 0:
                raise DataError(f"{path}: rks_sigma must be positive, got {sigma}")
        rks = RksSpec(
            dim=number("rks_dim", None, int),
            sigma=sigma,
            seed=number("rks_seed", 0, int),
        )
    elif "rks_sigma" in raw or "rks_seed" in raw:
        raise DataError(f"{path}: rks_sigma/rks_seed given without rks_dim")

    name = raw.get("name", path.stem)
    out_dir = path_of("out_dir") if "out_dir" in raw else Path("runs") / name

    cfg = ExperimentConfig(
        name=name,
        train_tsv=path_of("train_tsv"),
        test_tsv=path_of("test_tsv"),
        test_labels=path_of("test_labels"),
        vec_file=path_of("vec_file"),
        precomputed_file=path_of("precomputed_file"),
        stopwords_file=path_of("stopwords"),
        feature=feature,
        hodmd_d=hodmd_d,
        r_max=number("r_max", 10, int),
        sv_rel_tol=number("sv_rel_tol", 1e-10, float),
        rks=rks,
        classifier=raw["classifier"],
        lam=number("lambda", 1e-3, float),
        C=number("C", 1000.0, float),
        svm_epochs=number("svm_epochs", 200, int),
        lr=number("lr", 0.1, float),
        logreg_epochs=number("logreg_epochs", 500, int),
        l2=number("l2", 1e-3, float),
        var_floor=number("var_floor", 1e-9, float),
        seed=number("seed", 0, int),
        out_dir=out_dir,
    )
    cfg.validate()
    return cfg


def load_corpora(cfg: ExperimentConfig) -> tuple[LabeledCorpus, LabeledCorpus]:
    """The (train, test) corpora named by the config."""
    with open(cfg.train_tsv, "rb") as fh:
        train_corpus = load_olid_tsv(fh, split="train")
    label_fh = open(cfg.test_labels, "rb") if cfg.test_labels is not None else None
    try:
        with open(cfg.test_tsv, "rb") as fh:
            test_corpus = load_olid_tsv(fh, label_fh, split="test")
    finally:
        if label_fh is not None:
            label_fh.close()
    return train_corpus, test_corpus


def _n_workers() -> int:
    raw = os.environ.get("OFFD_THREADS")
    if raw is None:
        return 1
    try:
        value = int(raw)
    except ValueError:
        raise DataError(f"OFFD_THREADS must be a positive integer, got {raw!r}") from None
    if value < 1:
        raise DataError(f"OFFD_THREADS must be a positive integer, got {value}")
    return min(value, os.cpu_count() or 1)


def _map_records(fn, records):
    workers = _n_workers()
    if workers == 1 or len(records) < 2 * workers:
        return [fn(rec) for rec in records]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, records))


@dataclass
class FeaturePipeline:
    """Resolved feature extractor: corpus -> FeatureMatrix (one row per tweet)."""

    kind: str
    stopwords: frozenset[str]
    vec_table: WordVectorTable | None = None
    precomputed: PrecomputedTable | None = None
    hodmd: HodmdConfig | None = None

    def featurize(self, corpus: LabeledCorpus) -> FeatureMatrix:
        if self.kind == "avg":
            rows = _map_records(
                lambda rec: average_embedding(
                    tokenize_clean(rec.text, self.stopwords), self.vec_table
                ),
                corpus.records,
            )
            dim = self.vec_table.dim
        elif self.kind in ("dmd", "hodmd"):
            rows = _map_records(
                lambda rec: sentence_feature(
                    token_matrix(tokenize_clean(rec.text, self.stopwords), self.vec_table),
                    self.hodmd,
                ),
                corpus.records,
            )
            dim = self.vec_table.dim
        elif self.kind == "precomputed":
            rows = [self.precomputed.lookup(rec.id) for rec in corpus.records]
            dim = self.precomputed.dim or 0
        else:
            raise DataError(f"unknown feature kind {self.kind!r}")
        values = np.array(rows, dtype=np.float64) if rows else np.zeros((0, dim))
        return FeatureMatrix(values=values, ids=corpus.ids())


def build_pipeline(cfg: ExperimentConfig, corpora: list[LabeledCorpus]) -> FeaturePipeline:
    """Load the resources the configured feature mode needs.

    Word-vector tables are filtered to the tokens that actually occur in
    the given corpora.  The filter is a loading optimization only: it
    never changes a lookup result, so passing the test corpus here does
    not leak anything into feature fitting.
    """
    stopwords = (
        load_stopwords(cfg.stopwords_file.read_text(encoding="utf-8"))
        if cfg.stopwords_file is not None
        else default_stopwords()
    )
    vec_table = None
    precomputed = None
    hodmd = None
    if cfg.feature in ("avg", "dmd", "hodmd"):
        vocab: set[str] = set()
        for corpus in corpora:
            for rec in corpus.records:
                vocab.update(tokenize_clean(rec.text, stopwords))
        with open(cfg.vec_file, "rb") as fh:
            vec_table = load_vec_table(fh, vocab_filter=vocab)
        if cfg.feature in ("dmd", "hodmd"):
            hodmd = HodmdConfig(d=cfg.hodmd_d, r_max=cfg.r_max, sv_rel_tol=cfg.sv_rel_tol)
    else:
        with open(cfg.precomputed_file, "rb") as fh:
            precomputed = load_precomputed(fh)
    return FeaturePipeline(
        kind=cfg.feature,
        stopwords=stopwords,
        vec_table=vec_table,
        precomputed=precomputed,
        hodmd=hodmd,
    )


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _train(cfg: ExperimentConfig, F, y):
    if cfg.classifier == "rlsc":
        return train_rlsc(F, y, lam=cfg.lam)
    if cfg.classifier == "svm":
        return train_linear_svm(F, y, C=cfg.C, epochs=cfg.svm_epochs, seed=cfg.seed)
    if cfg.classifier == "logreg":
        return train_logreg(F, y, lr=cfg.lr, epochs=cfg.logreg_epochs, l2=cfg.l2, seed=cfg.seed)
    return train_gnb(F, y, var_floor=cfg.var_floor)


def _classifier_hyper(cfg: ExperimentConfig) -> dict:
    if cfg.classifier == "rlsc":
        return {"lambda": cfg.lam}
    if cfg.classifier == "svm":
        return {"C": cfg.C, "epochs": cfg.svm_epochs}
    if cfg.classifier == "logreg":
        return {"lr": cfg.lr, "epochs": cfg.logreg_epochs, "l2": cfg.l2}
    return {"var_floor": cfg.var_floor}


@dataclass
class ExperimentResult:
    report: MetricsReport
    manifest: dict
    model: object
    out_files: dict


def run_experiment(cfg: ExperimentConfig, write_files: bool = True) -> ExperimentResult:
    """Train per config, evaluate on the test corpus, emit artifacts.

    All outputs are computed before anything is written, then written via
    rename, so a failed run leaves no partial report files.
    """
    cfg.validate()
    cfg.check_inputs_exist()

    train_corpus, test_corpus = load_corpora(cfg)
    pipeline = build_pipeline(cfg, [train_corpus, test_corpus])
    train_F = pipeline.featurize(train_corpus)
    train_y = labels_to_signs(train_corpus)

    rks_map = None
    sigma = None
    if cfg.rks is not None:
        sigma = cfg.rks.sigma
        if sigma is None:
            sigma = median_heuristic_sigma(train_F.values, seed=cfg.rks.seed)
        rks_map = sample_map(train_F.dim, cfg.rks.dim, sigma, cfg.rks.seed)
        lifted = FeatureMatrix(values=transform(rks_map, train_F.values), ids=train_F.ids)
        model = _train(cfg, lifted, train_y)
        model.rks = rks_map
    else:
        model = _train(cfg, train_F, train_y)

    report = evaluate(model, test_corpus, pipeline.featurize)

    manifest = {
        "name": cfg.name,
        "package": {"name": "offdetect", "version": __version__},
        "feature": {
            "kind": cfg.feature,
            "d": cfg.hodmd_d if cfg.feature in ("dmd", "hodmd") else None,
            "r_max": cfg.r_max if cfg.feature in ("dmd", "hodmd") else None,
            "sv_rel_tol": cfg.sv_rel_tol if cfg.feature in ("dmd", "hodmd") else None,
            "dim": train_F.dim,
        },
        "rks": None
        if cfg.rks is None
        else {
            "dim": cfg.rks.dim,
            "sigma": sigma,
            "sigma_spec": "median" if cfg.rks.sigma is None else "fixed",
            "seed": cfg.rks.seed,
            "prng": PRNG_ID,
        },
        "classifier": {"kind": cfg.classifier, **_classifier_hyper(cfg)},
        "seeds": {
            "train": cfg.seed,
            "rks": None if cfg.rks is None else cfg.rks.seed,
        },
        "inputs": {
            key: {"path": str(path), "sha256": _sha256(path)}
            for key, path in sorted(cfg.input_paths().items())
        },
        "corpus": {
            "train_records": len(train_corpus),
            "test_records": len(test_corpus),
        },
    }

    out_files: dict[str, Path] = {}
    if write_files:
        out_dir = Path(cfg.out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        tsv, text = render_report([(cfg.name, report)])
        payloads = {
            "report.tsv": tsv.encode("utf-8"),
            "report.txt": text.encode("utf-8"),
            "manifest.json": (json.dumps(manifest, sort_keys=True, indent=2) + "\n").encode(
                "utf-8"
            ),
        }
        for filename, payload in payloads.items():
            _atomic_write(out_dir / filename, payload)
            out_files[filename] = out_dir / filename
        model_path = out_dir / "model.offd"
        tmp = model_path.with_suffix(".offd.tmp")
        with open(tmp, "wb") as fh:
            save_model(model, fh)
        os.replace(tmp, model_path)
        out_files["model.offd"] = model_path

    return ExperimentResult(report=report, manifest=manifest, model=model, out_files=out_files)


def _atomic_write(path: Path, payload: bytes) -> None:
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "wb") as fh:
        fh.write(payload)
    os.replace(tmp, path)


def export_feature_lines(cfg: ExperimentConfig) -> list[str]:
    """Raw (pre-lift) features of every train then test tweet, one
    ``id v1 ... v_dim`` line each, in the precomputed-vector text format."""
    cfg.validate()
    cfg.check_inputs_exist()
    train_corpus, test_corpus = load_corpora(cfg)
    pipeline = build_pipeline(cfg, [train_corpus, test_corpus])
    lines: list[str] = []
    for corpus in (train_corpus, test_corpus):
        features = pipeline.featurize(corpus)
        for tweet_id, row in zip(features.ids, features.values):
            lines.append(" ".join([tweet_id, *(repr(float(v)) for v in row)]))
    return lines
