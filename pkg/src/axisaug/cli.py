"""Command-line pipeline: tag, augment, filter, eval, stats, run.

Exit codes: 0 success, 2 configuration error, 3 input parse failure,
4 embedding provider failure after retries.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

from axisaug.augment import (
    ALL_METHODS,
    ALL_SOURCES,
    AXIS_MODE_TOKENS,
    AugmentationConfig,
    run_augmentation,
)
from axisaug.evaluate import retrieve, score_predictions
from axisaug.filtering import (
    DEFAULT_ALPHA,
    DEFAULT_BETA,
    HashEmbeddingProvider,
    ProviderError,
    RemoteEmbeddingProvider,
    filter_pairs,
)
from axisaug.ingest import (
    Dataset,
    LoadReport,
    load_dataset,
    load_icd,
    load_lexicon,
    load_pairs,
)
from axisaug.model import AxisAugError, AxisType, DiseasePair, Provenance
from axisaug.tagger import LexiconTagger, write_bio_file

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_PARSE = 3
EXIT_PROVIDER = 4

AUGMENTED_FILE = "augmented.jsonl"
FILTERED_FILE = "filtered.jsonl"
VERDICTS_FILE = "verdicts.jsonl"


class ConfigError(AxisAugError):
    pass


_PATH_KEYS = ("icd", "pairs", "region-tree", "lexicon", "out")
_VALUE_KEYS = _PATH_KEYS + (
    "methods",
    "axis-modes",
    "mga-sources",
    "alpha",
    "beta",
    "provider",
    "provider-url",
    "top-k",
    "workers",
)


@dataclass
class PipelineConfig:
    icd: Path | None = None
    pairs: Path | None = None
    region_tree: Path | None = None
    lexicon: Path | None = None
    out: Path | None = None
    methods: tuple[str, ...] = ALL_METHODS
    axis_modes: tuple[AxisType, ...] = tuple(AXIS_MODE_TOKENS.values())
    mga_sources: tuple[str, ...] = ALL_SOURCES
    alpha: float = DEFAULT_ALPHA
    beta: float = DEFAULT_BETA
    provider: str = "builtin"
    provider_url: str | None = None
    top_k: int = 1
    workers: int = 1

    def violations(self, required: tuple[str, ...]) -> list[str]:
        """Every violated constraint, not just the first."""
        problems = []
        for name in required:
            if getattr(self, name) is None:
                problems.append(f"--{name.replace('_', '-')} is required")
        if self.alpha < 0:
            problems.append(f"alpha must be >= 0, got {self.alpha}")
        if not -1 <= self.beta <= 1:
            problems.append(f"beta must lie in [-1, 1], got {self.beta}")
        if self.top_k < 1:
            problems.append(f"top-k must be >= 1, got {self.top_k}")
        if self.workers < 1:
            problems.append(f"workers must be >= 1, got {self.workers}")
        if self.provider not in ("builtin", "remote"):
            problems.append(f"provider must be builtin or remote, got {self.provider!r}")
        if self.provider == "remote" and not self.provider_url:
            problems.append("provider-url is required when provider is remote")
        return problems

    def make_provider(self):
        if self.provider == "remote":
            assert self.provider_url is not None
            return RemoteEmbeddingProvider(self.provider_url)
        return HashEmbeddingProvider()


def _read_config_file(path: Path) -> dict[str, str]:
    """``key = value`` lines; ``#`` starts a comment; keys match flag names."""
    values: dict[str, str] = {}
    for lineno, raw in enumerate(path.read_text(encoding="utf-8-sig").splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in _VALUE_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = value
    return values


def _parse_tokens(text: str, allowed: dict[str, object] | tuple, what: str) -> tuple:
    tokens = [t.strip() for t in text.split(",") if t.strip()]
    if isinstance(allowed, dict):
        bad = [t for t in tokens if t not in allowed]
        if bad:
            raise ConfigError(f"unknown {what}: {', '.join(bad)}")
        return tuple(allowed[t] for t in tokens)
    bad = [t for t in tokens if t not in allowed]
    if bad:
        raise ConfigError(f"unknown {what}: {', '.join(bad)}")
    return tuple(tokens)


def _build_config(args: argparse.Namespace) -> PipelineConfig:
    file_values: dict[str, str] = {}
    base = Path.cwd()
    if args.config:
        config_path = Path(args.config)
        file_values = _read_config_file(config_path)
        base = config_path.parent

    def pick(flag_name: str, key: str) -> str | None:
        flag = getattr(args, flag_name)
        if flag is not None:
            return str(flag)
        return file_values.get(key)

    def pick_path(flag_name: str, key: str) -> Path | None:
        flag = getattr(args, flag_name)
        if flag is not None:
            return Path(flag)
        if key in file_values:
            # Paths in a config file are relative to the file itself.
            return base / file_values[key]
        return None

    config = PipelineConfig(
        icd=pick_path("icd", "icd"),
        pairs=pick_path("pairs", "pairs"),
        region_tree=pick_path("region_tree", "region-tree"),
        lexicon=pick_path("lexicon", "lexicon"),
        out=pick_path("out", "out"),
    )
    if (value := pick("methods", "methods")) is not None:
        config.methods = _parse_tokens(value, ALL_METHODS, "methods")
    if (value := pick("axis_modes", "axis-modes")) is not None:
        config.axis_modes = _parse_tokens(value, AXIS_MODE_TOKENS, "axis modes")
    if (value := pick("mga_sources", "mga-sources")) is not None:
        config.mga_sources = _parse_tokens(value, ALL_SOURCES, "MGA sources")
    try:
        if (value := pick("alpha", "alpha")) is not None:
            config.alpha = float(value)
        if (value := pick("beta", "beta")) is not None:
            config.beta = float(value)
        if (value := pick("top_k", "top-k")) is not None:
            config.top_k = int(value)
        if (value := pick("workers", "workers")) is not None:
            config.workers = int(value)
    except ValueError as exc:
        raise ConfigError(f"bad numeric value: {exc}") from exc
    if (value := pick("provider", "provider")) is not None:
        config.provider = value
    if (value := pick("provider_url", "provider-url")) is not None:
        config.provider_url = value
    return config


def _fail_config(problems: list[str]) -> int:
    for problem in problems:
        print(f"config error: {problem}", file=sys.stderr)
    return EXIT_CONFIG


def _report_issues(report: LoadReport) -> None:
    for warning in report.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    for error in report.errors:
        print(f"error: {error}", file=sys.stderr)


def _load_full_dataset(config: PipelineConfig) -> Dataset:
    dataset, report = load_dataset(
        config.icd, config.pairs, config.region_tree, config.lexicon
    )
    _report_issues(report)
    if not report.ok:
        raise AxisAugError(f"{len(report.errors)} input parse errors")
    return dataset


def _write_lines(path: Path, lines: list[str]) -> None:
    path.write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")


def _pair_rows(pairs: list[DiseasePair]) -> list[str]:
    return [
        json.dumps(
            {"text": p.udn, "normalized_result": sdn, "provenance": p.provenance.value},
            ensure_ascii=False,
        )
        for p in pairs
        for sdn in p.sdns
    ]


def _read_pair_rows(path: Path) -> list[DiseasePair]:
    pairs = []
    for raw in path.read_text(encoding="utf-8").splitlines():
        if not raw.strip():
            continue
        row = json.loads(raw)
        pairs.append(
            DiseasePair(
                udn=row["text"],
                sdns=(row["normalized_result"],),
                provenance=Provenance(row.get("provenance", "Original")),
            )
        )
    return pairs


def cmd_tag(config: PipelineConfig) -> int:
    icd, icd_report = load_icd(config.icd)
    pairs, pairs_report = load_pairs(config.pairs)
    lexicon, lexicon_report = load_lexicon(config.lexicon)
    for report in (icd_report, pairs_report, lexicon_report):
        _report_issues(report)
        if not report.ok:
            return EXIT_PARSE
    names: set[str] = {e.name for e in icd}
    for pair in pairs:
        names.add(pair.udn)
        names.update(pair.sdns)
    tagger = LexiconTagger(lexicon)
    annotations = [tagger.annotate(name) for name in sorted(names)]
    config.out.mkdir(parents=True, exist_ok=True)
    write_bio_file(annotations, config.out / "annotations.bio")
    zero_axis = sum(1 for a in annotations if not a.axes)
    _write_lines(
        config.out / "tag_report.txt",
        [f"names = {len(annotations)}", f"zero_axis = {zero_axis}"],
    )
    return EXIT_OK


def cmd_augment(config: PipelineConfig, dataset: Dataset | None = None) -> int:
    dataset = dataset or _load_full_dataset(config)
    aug_config = AugmentationConfig(
        methods=config.methods,
        axis_modes=config.axis_modes,
        mga_sources=config.mga_sources,
        workers=config.workers,
    )
    generated, report = run_augmentation(dataset, aug_config)
    config.out.mkdir(parents=True, exist_ok=True)
    _write_lines(config.out / AUGMENTED_FILE, _pair_rows(generated))
    _write_lines(config.out / "augment_report.txt", report.as_lines())
    return EXIT_OK


def cmd_filter(config: PipelineConfig) -> int:
    source = config.out / AUGMENTED_FILE
    pairs = _read_pair_rows(source)
    provider = config.make_provider()
    outcome = filter_pairs(pairs, alpha=config.alpha, beta=config.beta, provider=provider)
    _write_lines(config.out / FILTERED_FILE, _pair_rows(outcome.kept))
    _write_lines(
        config.out / VERDICTS_FILE,
        [
            json.dumps(
                {
                    "text": v.udn,
                    "normalized_result": v.sdn,
                    "ngm": v.ngm,
                    "cosine": v.cosine,
                    "passed": v.passed,
                },
                ensure_ascii=False,
            )
            for v in outcome.verdicts
        ],
    )
    _write_lines(
        config.out / "filter_report.txt",
        [
            f"alpha = {config.alpha}",
            f"beta = {config.beta}",
            f"provider = {provider.model_id}",
            f"input = {len(outcome.verdicts)}",
            f"kept = {len(outcome.kept)}",
            f"rejected = {len(outcome.verdicts) - len(outcome.kept)}",
        ],
    )
    return EXIT_OK


def cmd_stats(config: PipelineConfig) -> int:
    augmented = _read_pair_rows(config.out / AUGMENTED_FILE)
    filtered_path = config.out / FILTERED_FILE
    kept = _read_pair_rows(filtered_path) if filtered_path.exists() else []
    tags = sorted({p.provenance.value for p in augmented} | {p.provenance.value for p in kept})
    lines = [
        f"pairs.generated = {len(augmented)}",
        f"pairs.kept = {len(kept)}",
    ]
    for tag in tags:
        generated_count = sum(1 for p in augmented if p.provenance.value == tag)
        kept_count = sum(1 for p in kept if p.provenance.value == tag)
        lines.append(f"{tag}.generated = {generated_count}")
        lines.append(f"{tag}.kept = {kept_count}")
    _write_lines(config.out / "stats.txt", lines)
    for line in lines:
        print(line)
    return EXIT_OK


def cmd_eval(config: PipelineConfig) -> int:
    icd, icd_report = load_icd(config.icd)
    gold, gold_report = load_pairs(config.pairs)
    for report in (icd_report, gold_report):
        _report_issues(report)
        if not report.ok:
            return EXIT_PARSE
    if not gold:
        print("error: no gold pairs loaded", file=sys.stderr)
        return EXIT_PARSE
    if not icd:
        print("error: ICD table is empty", file=sys.stderr)
        return EXIT_PARSE
    knowledge_path = config.out / FILTERED_FILE
    knowledge = _read_pair_rows(knowledge_path) if knowledge_path.exists() else []
    provider = config.make_provider()
    predicted = [
        DiseasePair(
            udn=udn,
            sdns=tuple(retrieve(udn, icd, knowledge, config.top_k, provider)),
            provenance=Provenance.ORIGINAL,
        )
        for udn in sorted({pair.udn for pair in gold})
    ]
    report = score_predictions(gold, predicted)
    config.out.mkdir(parents=True, exist_ok=True)
    _write_lines(config.out / "metrics.txt", report.as_lines())
    for line in report.as_lines():
        print(line)
    return EXIT_OK if not report.predictions_empty else 1


def cmd_run(config: PipelineConfig) -> int:
    dataset = _load_full_dataset(config)
    status = cmd_tag(config)
    if status != EXIT_OK:
        return status
    status = cmd_augment(config, dataset)
    if status != EXIT_OK:
        return status
    status = cmd_filter(config)
    if status != EXIT_OK:
        return status
    return cmd_stats(config)


_REQUIRED = {
    "tag": ("icd", "pairs", "lexicon", "out"),
    "augment": ("icd", "pairs", "region_tree", "lexicon", "out"),
    "filter": ("out",),
    "stats": ("out",),
    "eval": ("icd", "pairs", "out"),
    "run": ("icd", "pairs", "region_tree", "lexicon", "out"),
}

_COMMANDS = {
    "tag": cmd_tag,
    "augment": cmd_augment,
    "filter": cmd_filter,
    "stats": cmd_stats,
    "eval": cmd_eval,
    "run": cmd_run,
}


def _make_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--config", help="key = value file; flags override it")
    shared.add_argument("--icd", help="ICD table, code<TAB>name per line")
    shared.add_argument("--pairs", help="training pairs, JSON lines")
    shared.add_argument("--region-tree", dest="region_tree", help="child<TAB>parent per line")
    shared.add_argument("--lexicon", help="surface<TAB>type per line")
    shared.add_argument("--out", help="artifact directory")
    shared.add_argument("--methods", help=f"comma list of {','.join(ALL_METHODS)}")
    shared.add_argument("--axis-modes", dest="axis_modes", help="comma list of Region,Center,Characteristic")
    shared.add_argument("--mga-sources", dest="mga_sources", help="comma list of ICD,TrainingSet")
    shared.add_argument("--alpha", type=float, help="ngm threshold (default 0.7)")
    shared.add_argument("--beta", type=float, help="cosine threshold (default 0.8)")
    shared.add_argument("--provider", choices=["builtin", "remote"], help="embedding provider")
    shared.add_argument("--provider-url", dest="provider_url", help="base URL of the embedding service")
    shared.add_argument("--top-k", dest="top_k", type=int, help="retrieval depth for eval")
    shared.add_argument("--workers", type=int, help="parallel workers for augmentation")

    parser = argparse.ArgumentParser(
        prog="axisaug",
        description="Axis-word data augmentation for disease-name normalization datasets",
    )
    commands = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("tag", "write BIO annotations for every known name"),
        ("augment", "generate pairs with AR1/AR2/MGA-Code/MGA-Region"),
        ("filter", "gate generated pairs by ngm and embedding cosine"),
        ("eval", "retrieval baseline + precision/recall/F1"),
        ("stats", "per-technique counts before and after filtering"),
        ("run", "tag, augment, filter, stats in sequence"),
    ):
        commands.add_parser(name, parents=[shared], help=help_text)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _make_parser().parse_args(argv)
    try:
        config = _build_config(args)
    except ConfigError as exc:
        return _fail_config([str(exc)])
    except FileNotFoundError as exc:
        return _fail_config([f"cannot read config file: {exc}"])
    problems = config.violations(_REQUIRED[args.command])
    if problems:
        return _fail_config(problems)
    try:
        return _COMMANDS[args.command](config)
    except ProviderError as exc:
        print(f"provider error: {exc}", file=sys.stderr)
        return EXIT_PROVIDER
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except AxisAugError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
