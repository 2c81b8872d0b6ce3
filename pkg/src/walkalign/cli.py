"""Command-line pipeline with composable stages and persisted artifacts.

Every stage reads and writes plain-text artifacts (edge TSVs, walk files,
corpora, embeddings), so a full ``run`` is byte-identical to chaining the
individual subcommands with the same settings. ``run`` takes a flat
``key = value`` config file (``#`` starts a comment line) and records the
resolved configuration plus input digests in ``manifest.txt``, which is
itself a valid config file.

Exit codes: 0 success, 1 internal error, 2 input error.
"""

from __future__ import annotations

import argparse
import hashlib
import logging
import sys
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from . import __version__, alignment, corpus, graph, ntriples, projection, ranking, sgns, walker

log = logging.getLogger("walkalign")


class ConfigError(ValueError):
    pass


class StageError(RuntimeError):
    def __init__(self, stage: str, cause: BaseException):
        super().__init__(f"stage '{stage}' failed: {cause}")
        self.stage = stage
        self.cause = cause


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("true", "1", "yes", "on"):
        return True
    if lowered in ("false", "0", "no", "off"):
        return False
    raise ConfigError(f"expected a boolean, got {text!r}")


def _parse_paths(text: str) -> list[str]:
    return [part.strip() for part in text.split(",") if part.strip()]


# --------------------------------------------------------------------------
# Pipeline configuration
# --------------------------------------------------------------------------


@dataclass
class PipelineConfig:
    ontologies: list[str] = field(default_factory=list)
    mappings: list[str] = field(default_factory=list)
    combinator: str = "union"
    default_relation: str = "equivalence"
    inverse_subclass: bool = True
    annotation_props: list[str] = field(default_factory=lambda: list(projection.DEFAULT_ANNOTATION_PROPS))
    lenient: bool = False
    walk_depth: int = 3
    iterations: int = 1
    replace_prob: float = 0.5
    label_choice: str = "primary"
    dim: int = 100
    epochs: int = 70
    window: int = 5
    negatives: int = 5
    initial_lr: float = 0.025
    final_lr: float = 1e-4
    min_count: int = 1
    unigram_power: float = 0.75
    subsample: float = 0.0
    rng_seed: int = 0
    workers: int = 1
    pools: str = ""
    out_dir: str = "out"

    def validate(self) -> None:
        if not self.ontologies:
            raise ConfigError("at least one ontology path is required")
        for path in [*self.ontologies, *self.mappings] + ([self.pools] if self.pools else []):
            if not Path(path).is_file():
                raise ConfigError(f"input file does not exist: {path}")
        if self.combinator not in ("union", "intersection"):
            raise ConfigError(f"combinator must be union or intersection, got {self.combinator!r}")
        if self.default_relation not in ("equivalence", "subsumption"):
            raise ConfigError(f"default_relation must be equivalence or subsumption")
        if self.walk_depth < 1:
            raise ConfigError("walk_depth must be >= 1")
        if self.iterations < 1:
            raise ConfigError("iterations must be >= 1")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")


_CONFIG_PARSERS = {
    "ontologies": _parse_paths,
    "mappings": _parse_paths,
    "combinator": str,
    "default_relation": str,
    "inverse_subclass": _parse_bool,
    "annotation_props": _parse_paths,
    "lenient": _parse_bool,
    "walk_depth": int,
    "iterations": int,
    "replace_prob": float,
    "label_choice": str,
    "dim": int,
    "epochs": int,
    "window": int,
    "negatives": int,
    "initial_lr": float,
    "final_lr": float,
    "min_count": int,
    "unigram_power": float,
    "subsample": float,
    "rng_seed": int,
    "workers": int,
    "pools": str,
    "out_dir": str,
}


def parse_config_text(text: str) -> dict[str, str]:
    """Flat ``key = value`` lines; ``#`` lines are comments."""
    values: dict[str, str] = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"config line {number}: expected 'key = value'")
        key, _, value = line.partition("=")
        key = key.strip()
        if key not in _CONFIG_PARSERS:
            raise ConfigError(f"config line {number}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"config line {number}: duplicate key {key!r}")
        values[key] = value.strip()
    return values


def load_config(path) -> PipelineConfig:
    raw = parse_config_text(Path(path).read_text(encoding="utf-8"))
    kwargs = {}
    for key, text in raw.items():
        try:
            kwargs[key] = _CONFIG_PARSERS[key](text)
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(f"config key {key!r}: {exc}") from None
    return PipelineConfig(**kwargs)


def _format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, list):
        return ", ".join(str(v) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_manifest(cfg: PipelineConfig, path) -> None:
    """Every tunable as ``key = value`` plus input digests as comments."""
    lines = [f"# walkalign {__version__} run manifest"]
    for f in fields(cfg):
        lines.append(f"{f.name} = {_format_value(getattr(cfg, f.name))}")
    for input_path in [*cfg.ontologies, *cfg.mappings] + ([cfg.pools] if cfg.pools else []):
        digest = hashlib.sha256(Path(input_path).read_bytes()).hexdigest()
        lines.append(f"# sha256 {digest}  {input_path}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


# --------------------------------------------------------------------------
# Stages (shared by the individual subcommands and `run`)
# --------------------------------------------------------------------------


def stage_project(
    onto_paths: list[str],
    out_dir: Path,
    inverse_subclass: bool = True,
    annotation_props: list[str] | None = None,
    lenient: bool = False,
) -> list[tuple[Path, Path]]:
    """Project each ontology; returns (edges path, lexicon path) pairs.

    Fail-fast: in strict mode nothing is written unless every input parses.
    """
    results = []
    for path in onto_paths:
        triples = ntriples.parse_file(path, lenient=lenient)
        results.append((Path(path).stem, projection.project(triples, annotation_props, inverse_subclass=inverse_subclass)))
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for name, result in results:
        edges_path = out_dir / f"{name}.edges.tsv"
        lex_path = out_dir / f"{name}.lex.tsv"
        projection.save_edges_tsv(result.edges, edges_path)
        result.lexicon.save_tsv(lex_path)
        (out_dir / f"{name}.report.txt").write_text(result.report.render(), encoding="utf-8")
        written.append((edges_path, lex_path))
    return written


def _load_mapping_set(paths: list[str], combinator: str, default_relation: str) -> alignment.MappingSet:
    relation = alignment.Relation.EQUIVALENCE if default_relation == "equivalence" else alignment.Relation.SUBSUMPTION
    sets = [alignment.load_mappings(path, relation) for path in paths]
    if not sets:
        return alignment.MappingSet()
    combined = sets[0]
    combine = alignment.union if combinator == "union" else alignment.intersection
    for other in sets[1:]:
        combined = combine(combined, other)
    return combined


def stage_merge(
    edge_paths: list[str],
    mapping_paths: list[str],
    combinator: str,
    default_relation: str,
    out_dir: Path,
) -> tuple[Path, Path]:
    """Merge edge lists and mappings; writes graph.tsv and seeds.txt.

    Seeds are the mapped entities; without mappings every vertex is a seed.
    """
    mapping_set = _load_mapping_set(mapping_paths, combinator, default_relation)
    edge_lists = [projection.load_edges_tsv(path) for path in edge_paths]
    merged = graph.merge(edge_lists, mapping_set)
    seeds = alignment.seed_entities(mapping_set) if len(mapping_set) else list(merged.vertices)
    out_dir.mkdir(parents=True, exist_ok=True)
    graph_path = out_dir / "graph.tsv"
    seeds_path = out_dir / "seeds.txt"
    merged.dump_tsv(graph_path)
    seeds_path.write_text("".join(s + "\n" for s in seeds), encoding="utf-8")
    return graph_path, seeds_path


def stage_walk(
    graph_path,
    seeds_path,
    walk_depth: int,
    iterations: int,
    rng_seed: int,
    workers: int,
    out_path: Path,
) -> Path:
    merged = graph.WeightedGraph.load_tsv(graph_path)
    seeds = [line for line in Path(seeds_path).read_text(encoding="utf-8").splitlines() if line]
    cfg = walker.WalkConfig(walk_depth, iterations, rng_seed)
    walks = walker.generate_walks(merged, seeds, cfg, workers=workers)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    walker.write_walks(walks, out_path)
    return out_path


def _load_lexicons(paths: list[str]) -> projection.LexicalTable:
    lexicon = projection.LexicalTable()
    for path in paths:
        lexicon.merge(projection.LexicalTable.load_tsv(path))
    return lexicon


def stage_corpus(
    walks_path,
    lex_paths: list[str],
    replace_prob: float,
    rng_seed: int,
    out_dir: Path,
    label_choice: str = "primary",
) -> Path:
    walks = walker.read_walks(walks_path)
    lexicon = _load_lexicons(lex_paths)
    documents = corpus.build_documents(
        walks, lexicon, replace_prob=replace_prob, rng_seed=rng_seed, label_choice=label_choice
    )
    out_dir.mkdir(parents=True, exist_ok=True)
    corpus.write_sentences(documents.structure, out_dir / "structure.txt")
    corpus.write_sentences(documents.lexical, out_dir / "lexical.txt")
    corpus.write_sentences(documents.combined, out_dir / "combined.txt")
    merged_path = out_dir / "corpus.txt"
    corpus.write_sentences(documents.merged(), merged_path)
    if documents.iri_fallbacks:
        log.info("lexical document kept %d full-IRI fallback token(s)", documents.iri_fallbacks)
    return merged_path


def stage_train(corpus_path, cfg: sgns.TrainConfig, workers: int, out_path: Path) -> Path:
    sentences = corpus.read_sentences(corpus_path)
    table = sgns.train(sentences, cfg, workers=workers)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    table.save_word2vec(out_path)
    return out_path


def stage_rank(embeddings_path, lex_paths: list[str], pools_path, out_path: Path) -> Path:
    table = sgns.EmbeddingTable.load_word2vec(embeddings_path)
    lexicon = _load_lexicons(lex_paths)
    pools = ranking.load_pools(pools_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    ranking.save_ranked_candidates(pools, table, lexicon, out_path)
    return out_path


def stage_eval(embeddings_path, lex_paths: list[str], pools_path, out_path: Path | None) -> ranking.RankingReport:
    table = sgns.EmbeddingTable.load_word2vec(embeddings_path)
    lexicon = _load_lexicons(lex_paths)
    pools = ranking.load_pools(pools_path)
    report = ranking.evaluate(pools, table, lexicon)
    if out_path is not None:
        out_path.parent.mkdir(parents=True, exist_ok=True)
        report.save_tsv(out_path)
    return report


def run_pipeline(cfg: PipelineConfig) -> Path:
    """project -> merge -> walk -> corpus -> train -> (optional) eval."""
    cfg.validate()
    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_manifest(cfg, out_dir / "manifest.txt")

    def guarded(stage_name, fn, *args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except Exception as exc:
            raise StageError(stage_name, exc) from exc

    written = guarded(
        "project",
        stage_project,
        cfg.ontologies,
        out_dir / "projection",
        cfg.inverse_subclass,
        cfg.annotation_props,
        cfg.lenient,
    )
    edge_paths = [str(edges) for edges, _ in written]
    lex_paths = [str(lex) for _, lex in written]
    graph_path, seeds_path = guarded(
        "merge", stage_merge, edge_paths, cfg.mappings, cfg.combinator, cfg.default_relation, out_dir
    )
    walks_path = guarded(
        "walk",
        stage_walk,
        graph_path,
        seeds_path,
        cfg.walk_depth,
        cfg.iterations,
        cfg.rng_seed,
        cfg.workers,
        out_dir / "walks.txt",
    )
    corpus_path = guarded(
        "corpus",
        stage_corpus,
        walks_path,
        lex_paths,
        cfg.replace_prob,
        cfg.rng_seed,
        out_dir / "corpus",
        cfg.label_choice,
    )
    train_cfg = sgns.TrainConfig(
        dim=cfg.dim,
        epochs=cfg.epochs,
        window=cfg.window,
        negatives=cfg.negatives,
        initial_lr=cfg.initial_lr,
        final_lr=cfg.final_lr,
        min_count=cfg.min_count,
        unigram_power=cfg.unigram_power,
        subsample=cfg.subsample,
        rng_seed=cfg.rng_seed,
    )
    embeddings_path = guarded("train", stage_train, corpus_path, train_cfg, cfg.workers, out_dir / "embeddings.txt")
    if cfg.pools:
        guarded("rank", stage_rank, embeddings_path, lex_paths, cfg.pools, out_dir / "ranking.tsv")
        report = guarded("eval", stage_eval, embeddings_path, lex_paths, cfg.pools, out_dir / "report.tsv")
        print(report.render_table(), end="")
    return out_dir


# --------------------------------------------------------------------------
# Argument parsing
# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="walkalign", description=__doc__)
    parser.add_argument("--version", action="version", version=f"walkalign {__version__}")
    parser.add_argument("--workers", type=int, default=None, help="parallel workers (1 = deterministic)")
    parser.add_argument("--rng-seed", type=int, default=None, help="root RNG seed")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("project", help="project ontologies to edge lists and label tables")
    p.add_argument("--onto", nargs="+", required=True, metavar="FILE")
    p.add_argument("--out", required=True, metavar="DIR")
    p.add_argument("--inverse-subclass", type=_parse_bool, default=True, metavar="BOOL")
    p.add_argument("--annotation-prop", action="append", default=None, metavar="IRI")
    p.add_argument("--lenient", action="store_true")
    p.set_defaults(func=_cmd_project)

    p = sub.add_parser("merge", help="merge edge lists and seed mappings into one graph")
    p.add_argument("--edges", nargs="+", required=True, metavar="FILE")
    p.add_argument("--mappings", nargs="*", default=[], metavar="FILE")
    p.add_argument("--combinator", choices=("union", "intersection"), default="union")
    p.add_argument("--default-relation", choices=("equivalence", "subsumption"), default="equivalence")
    p.add_argument("--out", required=True, metavar="DIR")
    p.set_defaults(func=_cmd_merge)

    p = sub.add_parser("walk", help="biased random walks from the seed entities")
    p.add_argument("--graph", required=True, metavar="FILE")
    p.add_argument("--seeds", required=True, metavar="FILE")
    p.add_argument("--walk-depth", type=int, default=3)
    p.add_argument("--iterations", type=int, default=1)
    p.add_argument("--out", required=True, metavar="FILE")
    p.set_defaults(func=_cmd_walk)

    p = sub.add_parser("corpus", help="build structure/lexical/combined documents")
    p.add_argument("--walks", required=True, metavar="FILE")
    p.add_argument("--lex", nargs="+", required=True, metavar="FILE")
    p.add_argument("--replace-prob", type=float, default=0.5)
    p.add_argument("--label-choice", choices=("primary", "uniform"), default="primary")
    p.add_argument("--out", required=True, metavar="DIR")
    p.set_defaults(func=_cmd_corpus)

    p = sub.add_parser("train", help="train skip-gram embeddings over a corpus")
    p.add_argument("--corpus", required=True, metavar="FILE")
    p.add_argument("--dim", type=int, default=100)
    p.add_argument("--epochs", type=int, default=70)
    p.add_argument("--window", type=int, default=5)
    p.add_argument("--negatives", type=int, default=5)
    p.add_argument("--initial-lr", type=float, default=0.025)
    p.add_argument("--final-lr", type=float, default=1e-4)
    p.add_argument("--min-count", type=int, default=1)
    p.add_argument("--unigram-power", type=float, default=0.75)
    p.add_argument("--subsample", type=float, default=0.0)
    p.add_argument("--out", required=True, metavar="FILE")
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("rank", help="score and rank candidate pools")
    p.add_argument("--embeddings", required=True, metavar="FILE")
    p.add_argument("--lex", nargs="+", required=True, metavar="FILE")
    p.add_argument("--pools", required=True, metavar="FILE")
    p.add_argument("--out", required=True, metavar="FILE")
    p.set_defaults(func=_cmd_rank)

    p = sub.add_parser("eval", help="compute MRR and Hits@K over candidate pools")
    p.add_argument("--embeddings", required=True, metavar="FILE")
    p.add_argument("--lex", nargs="+", required=True, metavar="FILE")
    p.add_argument("--pools", required=True, metavar="FILE")
    p.add_argument("--out", default=None, metavar="FILE")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("run", help="run the whole pipeline from a config file")
    p.add_argument("--config", required=True, metavar="FILE")
    p.add_argument("--out", default=None, metavar="DIR", help="override out_dir")
    p.set_defaults(func=_cmd_run)

    return parser


def _seed(args, default: int = 0) -> int:
    return args.rng_seed if args.rng_seed is not None else default


def _workers(args, default: int = 1) -> int:
    return args.workers if args.workers is not None else default


def _cmd_project(args) -> int:
    stage_project(args.onto, Path(args.out), args.inverse_subclass, args.annotation_prop, args.lenient)
    return 0


def _cmd_merge(args) -> int:
    stage_merge(args.edges, args.mappings, args.combinator, args.default_relation, Path(args.out))
    return 0


def _cmd_walk(args) -> int:
    stage_walk(args.graph, args.seeds, args.walk_depth, args.iterations, _seed(args), _workers(args), Path(args.out))
    return 0


def _cmd_corpus(args) -> int:
    stage_corpus(args.walks, args.lex, args.replace_prob, _seed(args), Path(args.out), args.label_choice)
    return 0


def _cmd_train(args) -> int:
    cfg = sgns.TrainConfig(
        dim=args.dim,
        epochs=args.epochs,
        window=args.window,
        negatives=args.negatives,
        initial_lr=args.initial_lr,
        final_lr=args.final_lr,
        min_count=args.min_count,
        unigram_power=args.unigram_power,
        subsample=args.subsample,
        rng_seed=_seed(args),
    )
    stage_train(args.corpus, cfg, _workers(args), Path(args.out))
    return 0


def _cmd_rank(args) -> int:
    stage_rank(args.embeddings, args.lex, args.pools, Path(args.out))
    return 0


def _cmd_eval(args) -> int:
    report = stage_eval(args.embeddings, args.lex, args.pools, Path(args.out) if args.out else None)
    print(report.render_table(), end="")
    return 0


def _cmd_run(args) -> int:
    cfg = load_config(args.config)
    overrides = {}
    if args.out is not None:
        overrides["out_dir"] = args.out
    if args.workers is not None:
        overrides["workers"] = args.workers
    if args.rng_seed is not None:
        overrides["rng_seed"] = args.rng_seed
    if overrides:
        cfg = replace(cfg, **overrides)
    run_pipeline(cfg)
    return 0


_INPUT_ERROR_TYPES = (
    ntriples.MalformedLine,
    alignment.MappingError,
    ConfigError,
    sgns.EmptyCorpus,
    ranking.EmptyPool,
    OSError,
    ValueError,
)


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except StageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2 if isinstance(exc.cause, _INPUT_ERROR_TYPES) else 1
    except _INPUT_ERROR_TYPES as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {exc}", file=sys.stderr)
        return 1


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
