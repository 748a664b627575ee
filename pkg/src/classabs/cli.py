"""Command-line interface: synth / stats / run / compare subcommands."""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    tomllib = None

from . import class_cluster, pipeline, synth, vectorize
from .classify import GbdtParams
from .corpus import (CorpusError, ParseError, ValidationError, load_corpus,
                     save_corpus, segment_corpus, split_sentences)
from .evaluate import load_report, results_table, save_report
from .pipeline import ConfigError, PipelineConfig

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_NUMERIC = 4

_CONFIG_KEYS = {
    "corpus", "hierarchy", "format", "method", "K", "lsi_topics", "features",
    "min_df", "embedding_kind", "embedding_file", "sentence_embedding_file",
    "folds", "seed", "out", "n_trees", "max_depth", "learning_rate",
    "min_samples_leaf", "tau",
}


def _load_config_file(path):
    text = Path(path).read_bytes()
    if str(path).endswith(".json"):
        raw = json.loads(text)
    elif tomllib is not None:
        raw = tomllib.loads(text.decode("utf-8"))
    else:
        raise ConfigError(
            "TOML configs need Python >= 3.11; use a .json config instead"
        )
    unknown = set(raw) - _CONFIG_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    return raw


def _add_run_args(p):
    p.add_argument("--config", help="TOML or JSON config file")
    p.add_argument("--corpus", help="corpus JSONL/CSV path")
    p.add_argument("--hierarchy", help="hierarchy JSON path")
    p.add_argument("--format", choices=("jsonl", "csv"), default=None)
    p.add_argument("--method", choices=pipeline.METHODS, default=None)
    p.add_argument("--K", type=int, default=None)
    p.add_argument("--lsi-topics", type=int, default=None)
    p.add_argument("--features", choices=("tfidf", "lsi"), default=None)
    p.add_argument("--min-df", type=int, default=None)
    p.add_argument("--embedding-kind", choices=pipeline.EMBEDDING_KINDS,
                   default=None)
    p.add_argument("--embedding-file", default=None)
    p.add_argument("--sentence-embedding-file", default=None)
    p.add_argument("--folds", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--n-trees", type=int, default=None)
    p.add_argument("--max-depth", type=int, default=None)
    p.add_argument("--learning-rate", type=float, default=None)
    p.add_argument("--min-samples-leaf", type=int, default=None)
    p.add_argument("--tau", type=float, default=None)
    p.add_argument("--out", required=False, help="output directory")


def _merged_run_config(args) -> dict:
    cfg = {}
    if args.config:
        cfg.update(_load_config_file(args.config))
    for key in _CONFIG_KEYS:
        val = getattr(args, key.replace("-", "_"), None)
        if val is not None:
            cfg[key] = val
    for required in ("corpus", "hierarchy", "method", "K", "out"):
        if cfg.get(required) is None:
            raise ConfigError(f"missing required setting {required!r}")
    if cfg["method"] == "unsupervised-ca":
        kind = cfg.get("embedding_kind", "mean")
        if kind == "sentence" and not cfg.get("sentence_embedding_file"):
            raise ConfigError(
                "sentence_embedding_file required for embedding_kind=sentence"
            )
        if kind != "sentence" and not cfg.get("embedding_file"):
            raise ConfigError(
                "embedding_file required for unsupervised-ca"
            )
    return cfg


def cmd_synth(args):
    corpus = synth.generate_synthetic_corpus(
        fine_classes=args.fine, groups=args.groups,
        docs_per_class=args.docs_per_class, sig_size=args.sig_size,
        noise_rate=args.noise_rate, seed=args.seed,
    )
    if args.outlier_docs:
        corpus = synth.add_outlier_class(
            corpus, docs=args.outlier_docs, sig_size=args.sig_size,
            seed=args.seed,
        )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    save_corpus(corpus, out / "corpus.jsonl", out / "hierarchy.json")
    if args.emit_embeddings:
        vectors = synth.synthetic_embeddings(
            fine_classes=args.fine, groups=args.groups,
            sig_size=args.sig_size, seed=args.seed,
        )
        synth.write_fasttext_file(vectors, out / "embeddings.vec")
    print(f"wrote {len(corpus)} documents to {out}")
    return EXIT_OK


def cmd_stats(args):
    corpus = load_corpus(args.corpus, args.hierarchy,
                         format=args.format or "jsonl")
    sizes = corpus.hierarchy.level_sizes()
    print(f"{'Language':<10}{'Main':>6}{'Themes':>8}{'Beliefs':>9}"
          f"{'Docs':>7}{'Sents':>7}")
    for lang in corpus.languages():
        docs = [d for d in corpus.documents if d.lang == lang]
        sents = sum(len(split_sentences(d.text)) for d in docs)
        beliefs = {l for d in docs for l in d.labels}
        themes = {corpus.hierarchy.belief_to_theme[b] for b in beliefs}
        mains = {corpus.hierarchy.theme_to_main[t] for t in themes}
        print(f"{lang:<10}{len(mains):>6}{len(themes):>8}{len(beliefs):>9}"
              f"{len(docs):>7}{sents:>7}")
    print(f"{'total':<10}{sizes['main']:>6}{sizes['theme']:>8}"
          f"{sizes['belief']:>9}{len(corpus):>7}"
          f"{sum(len(split_sentences(d.text)) for d in corpus.documents):>7}")
    return EXIT_OK


def cmd_run(args):
    cfg = _merged_run_config(args)
    gbdt = GbdtParams(
        n_trees=cfg.get("n_trees", 100),
        max_depth=cfg.get("max_depth", 3),
        learning_rate=cfg.get("learning_rate", 0.1),
        min_samples_leaf=cfg.get("min_samples_leaf", 2),
        tau=cfg.get("tau", 0.5),
    )
    config = PipelineConfig(
        method=cfg["method"], K=int(cfg["K"]),
        lsi_topics=cfg.get("lsi_topics", 100),
        features=cfg.get("features", "tfidf"),
        min_df=cfg.get("min_df", 2),
        embedding_kind=cfg.get("embedding_kind", "mean"),
        folds=cfg.get("folds", 8), seed=cfg.get("seed", 0),
        gbdt=gbdt,
    )
    corpus = load_corpus(cfg["corpus"], cfg["hierarchy"],
                         format=cfg.get("format", "jsonl"))
    embeddings = None
    sentence_embeddings = None
    if config.method == "unsupervised-ca":
        if config.embedding_kind == "sentence":
            corpus = segment_corpus(corpus)
            sentence_embeddings = vectorize.load_sentence_embeddings(
                cfg["sentence_embedding_file"], corpus
            )
        else:
            embeddings = vectorize.load_word_embeddings(cfg["embedding_file"])
    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)

    relabeled, artifacts = pipeline.apply_method(
        corpus, config, embeddings=embeddings,
        sentence_embeddings=sentence_embeddings,
    )
    if "merge_tree" in artifacts:
        class_cluster.save_json(
            class_cluster.mergetree_to_json(artifacts["merge_tree"]),
            out / "mergetree.json",
        )
        class_cluster.save_json(
            class_cluster.mapping_to_json(artifacts["mapping"]),
            out / "mapping.json",
        )
    if "assignments" in artifacts:
        with open(out / "assignments.jsonl", "w", encoding="utf-8") as fh:
            for d in relabeled.documents:
                fh.write(json.dumps(
                    {"doc_id": d.id, "labels": sorted(d.labels)}
                ) + "\n")

    mean, folds = pipeline.cross_validate(relabeled, config)
    for r in folds:
        save_report(r, out / f"report_fold_{r.fold}.json")
    save_report(mean, out / "report_mean.json")
    table_md, _ = results_table([mean])
    (out / "table.md").write_text(table_md, encoding="utf-8")
    print(table_md, end="")
    return EXIT_OK


def cmd_compare(args):
    reports = []
    for d in args.reports:
        reports.append(load_report(Path(d) / "report_mean.json"))
    corpora = {r.corpus for r in reports}
    if len(corpora) > 1:
        raise ValidationError(f"conflicting corpus ids: {sorted(corpora)}")
    table_md, table_json = results_table(reports)
    print(table_md, end="")
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "table.md").write_text(table_md, encoding="utf-8")
        with open(out / "table.json", "w", encoding="utf-8") as fh:
            json.dump(table_json, fh, indent=1)
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(
        prog="classabs",
        description="Label-space coarsening experiments on multi-label corpora",
    )
    sub = p.add_subparsers(dest="command", required=True)

    ps = sub.add_parser("synth", help="generate a synthetic corpus")
    ps.add_argument("--fine", type=int, default=12)
    ps.add_argument("--groups", type=int, default=3)
    ps.add_argument("--docs-per-class", type=int, default=30)
    ps.add_argument("--sig-size", type=int, default=8)
    ps.add_argument("--noise-rate", type=float, default=0.1)
    ps.add_argument("--seed", type=int, default=0)
    ps.add_argument("--outlier-docs", type=int, default=0)
    ps.add_argument("--emit-embeddings", action="store_true")
    ps.add_argument("--out", required=True)
    ps.set_defaults(func=cmd_synth)

    pt = sub.add_parser("stats", help="corpus statistics per language")
    pt.add_argument("--corpus", required=True)
    pt.add_argument("--hierarchy", required=True)
    pt.add_argument("--format", choices=("jsonl", "csv"), default=None)
    pt.set_defaults(func=cmd_stats)

    pr = sub.add_parser("run", help="run one class-abstraction experiment")
    _add_run_args(pr)
    pr.set_defaults(func=cmd_run)

    pc = sub.add_parser("compare", help="merge run reports into one table")
    pc.add_argument("reports", nargs="+", help="report directories")
    pc.add_argument("--out", default=None)
    pc.set_defaults(func=cmd_compare)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (CorpusError, vectorize.VectorizeError, OSError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (ArithmeticError, Exception) as exc:  # numeric / unexpected
        print(f"error ({type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
