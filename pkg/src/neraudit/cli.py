"""Command-line interface.

    neraudit parse-check corpus.conll [--repair]
    neraudit detect --train train.conll --target dev.conll --out cands.jsonl
    neraudit detect --train train.conll --cv 10 --seed 1 --out cands.jsonl
    neraudit pairs --in dev.conll --types PERSON,GPE --top 50
    neraudit rules scan --in train.conll --out proposals.jsonl
    neraudit rules apply --in train.conll --proposals p.jsonl --log d.jsonl \
        --out corrected.conll --report report.json
    neraudit rules interactive --in train.conll --proposals p.jsonl --log d.jsonl
    neraudit diff --old train.conll --new corrected.conll --out report.json --table
    neraudit score --gold test.conll --pred model.conll --out score.json
    neraudit score compare --old score_a.json --new score_b.json --per-type
    neraudit serve --corpus train.conll --candidates c.jsonl --proposals p.jsonl \
        --log d.jsonl --port 8400
    neraudit synth --tokens 100000 --out demo.conll
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .corpus import (
    ColumnFormat,
    Corpus,
    CorpusParseError,
    parse_corpus,
    serialize_corpus,
)
from .detector import Candidate, build_profile, cross_validated_flags, flag_partition, mention_type_pairs
from .diffstats import diff_corpora, render_tables
from .rules import (
    DEFAULT_RULES,
    decide,
    append_decision,
    load_decisions,
    load_proposals,
    replay,
    save_proposals,
    scan,
)
from .scorer import ScoreReport, compare, compare_per_type, round2, score
from .synth import synthetic_corpus


def _fmt_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--token-col", type=int, default=0, help="token column index")
    parser.add_argument(
        "--tag-col", type=int, default=-1, help="tag column index (-1 = last)"
    )
    parser.add_argument(
        "--separator", default=None, help="column separator (default: whitespace run)"
    )


def _fmt(args) -> ColumnFormat:
    return ColumnFormat(
        token_col=getattr(args, "token_col", 0),
        tag_col=getattr(args, "tag_col", -1),
        separator=getattr(args, "separator", None),
    )


def _load(path: str, args, repair: bool = False, partition: str = "other") -> Corpus:
    text = Path(path).read_text(encoding="utf-8")
    corpus, _ = parse_corpus(text, _fmt(args), repair=repair, partition=partition)
    return corpus


def _write_jsonl(path: str, objs) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for obj in objs:
            fh.write(json.dumps(obj, ensure_ascii=False) + "\n")


def cmd_parse_check(args) -> int:
    text = Path(args.file).read_text(encoding="utf-8")
    try:
        _, violations = parse_corpus(text, _fmt(args), repair=args.repair)
    except CorpusParseError as exc:
        for v in exc.violations:
            print(json.dumps(v.to_json(), ensure_ascii=False))
        return 1
    for v in violations:
        print(json.dumps(v.to_json(), ensure_ascii=False))
    if args.repair and args.out:
        corpus, _ = parse_corpus(text, _fmt(args), repair=True)
        Path(args.out).write_text(serialize_corpus(corpus, _fmt(args)), encoding="utf-8")
    return 0


def cmd_detect(args) -> int:
    train = _load(args.train, args, partition="train")
    if args.cv:
        candidates = cross_validated_flags(train, k=args.cv, seed=args.seed)
    else:
        target = _load(args.target, args, partition="target")
        candidates = flag_partition(target, build_profile(train))
    _write_jsonl(args.out, (c.to_json() for c in candidates))
    print(f"{len(candidates)} candidate(s) -> {args.out}")
    return 0


def cmd_pairs(args) -> int:
    corpus = _load(getattr(args, "in"), args)
    types = set(args.types.split(",")) if args.types else None
    entries = mention_type_pairs(corpus, types=types)
    if args.top:
        entries = entries[: args.top]
    out = sys.stdout if not args.out else open(args.out, "w", encoding="utf-8")
    try:
        for e in entries:
            out.write(f"{e.surface}\t{e.etype}\t{e.count}\n")
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


def cmd_rules_scan(args) -> int:
    corpus = _load(getattr(args, "in"), args)
    names = args.rules.split(",") if args.rules else None
    result = scan(corpus, rules=names)
    save_proposals(args.out, result.proposals)
    print(f"{len(result.proposals)} proposal(s) -> {args.out}")
    if args.candidates:
        _write_jsonl(args.candidates, (c.to_json() for c in result.review_candidates))
        print(f"{len(result.review_candidates)} review candidate(s) -> {args.candidates}")
    return 0


def cmd_rules_apply(args) -> int:
    corpus = _load(getattr(args, "in"), args)
    proposals = load_proposals(args.proposals)
    decisions = load_decisions(args.log)
    corrected, report = replay(corpus, decisions, proposals)
    Path(args.out).write_text(serialize_corpus(corrected, _fmt(args)), encoding="utf-8")
    if args.report:
        Path(args.report).write_text(
            json.dumps(report.to_json(), indent=2) + "\n", encoding="utf-8"
        )
    print(
        f"applied={report.applied} skipped_stale={report.skipped_stale} "
        f"rejected={report.rejected} pending={report.pending} -> {args.out}"
    )
    return 0


def cmd_rules_interactive(args) -> int:
    corpus = _load(getattr(args, "in"), args)
    proposals = load_proposals(args.proposals)
    already = {d.proposal_id for d in load_decisions(args.log)}
    pending = [p for p in proposals if p.id not in already]
    print(f"{len(pending)} pending proposal(s); [a]ccept [r]eject [s]kip [q]uit")
    for p in pending:
        sentence = corpus.locate(p.target.doc_id, p.target.sent_index)
        if sentence is None:
            continue
        words = list(sentence.texts())
        marked = (
            words[: p.target.start]
            + ["[[" + " ".join(words[p.target.start : p.target.end]) + "]]"]
            + words[p.target.end :]
        )
        print(f"\n{p.rule_id}: {p.target.etype}  {p.operation.to_json()}")
        print("  " + " ".join(marked))
        while True:
            answer = input("  a/r/s/q? ").strip().lower()
            if answer in ("a", "r", "s", "q"):
                break
        if answer == "q":
            break
        if answer == "s":
            continue
        verdict = "accept" if answer == "a" else "reject"
        append_decision(args.log, decide(p.id, verdict, actor=args.actor))
    return 0


def cmd_diff(args) -> int:
    old = _load(args.old, args)
    new = _load(args.new, args)
    report = diff_corpora(old, new)
    if args.out:
        Path(args.out).write_text(
            json.dumps(report.to_json(), indent=2) + "\n", encoding="utf-8"
        )
    if args.table or not args.out:
        print(render_tables(report), end="")
    return 0


def cmd_score(args) -> int:
    if args.score_cmd == "compare":
        old = ScoreReport.from_json(json.loads(Path(args.old).read_text()))
        new = ScoreReport.from_json(json.loads(Path(args.new).read_text()))
        overall = compare(old, new)
        err = overall.err_reduction
        print(f"{'':<14} {'old F1':>8} {'new F1':>8} {'delta':>7} {'err.red.':>9}")
        print(
            f"{'overall':<14} {round2(overall.old_f1):>8.2f} {round2(overall.new_f1):>8.2f} "
            f"{round2(overall.delta):>+7.2f} "
            + (f"{round2(err):>8.2f}%" if err is not None else f"{'n/a':>9}")
        )
        payload = {"overall": overall.to_json()}
        if args.per_type:
            payload["per_type"] = {}
            for t, d in compare_per_type(old, new).items():
                e = d.err_reduction
                payload["per_type"][t] = d.to_json()
                print(
                    f"{t:<14} {round2(d.old_f1):>8.2f} {round2(d.new_f1):>8.2f} "
                    f"{round2(d.delta):>+7.2f} "
                    + (f"{round2(e):>8.2f}%" if e is not None else f"{'n/a':>9}")
                )
        if args.out:
            Path(args.out).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
        return 0

    if not args.gold or not args.pred:
        print("error: score needs --gold and --pred (or the compare subcommand)", file=sys.stderr)
        return 2
    gold = _load(args.gold, args)
    pred = _load(args.pred, args)
    report = score(gold, pred)
    if args.out:
        Path(args.out).write_text(
            json.dumps(report.to_json(), indent=2) + "\n", encoding="utf-8"
        )
    o = report.overall
    print(
        f"overall P={round2(o.precision):.2f} R={round2(o.recall):.2f} "
        f"F1={round2(o.f1):.2f} (tp={o.tp} fp={o.fp} fn={o.fn})"
    )
    return 0


def cmd_serve(args) -> int:
    from .service import ReviewSession, make_server

    corpus = _load(args.corpus, args)
    candidates = []
    if args.candidates:
        with open(args.candidates, encoding="utf-8") as fh:
            candidates = [Candidate.from_json(json.loads(ln)) for ln in fh if ln.strip()]
    proposals = load_proposals(args.proposals) if args.proposals else []
    session = ReviewSession(
        corpus,
        candidates,
        proposals,
        log_path=args.log,
        actor=args.actor,
        out_dir=args.out_dir,
    )
    server = make_server(session, port=args.port, ui_dir=args.ui_dir, verbose=args.verbose)
    host, port = server.server_address[:2]
    print(f"review service on http://{host}:{port}/ (api under /api/v1)", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        server.shutdown()
    return 0


def cmd_synth(args) -> int:
    corpus = synthetic_corpus(
        args.tokens, n_docs=args.docs, seed=args.seed, partition=args.partition
    )
    Path(args.out).write_text(serialize_corpus(corpus), encoding="utf-8")
    print(f"{corpus.n_tokens} tokens / {len(corpus)} sentences -> {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="neraudit", description="audit and correct BIO-tagged NER corpora"
    )
    sub = parser.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("parse-check", help="validate a corpus file, print violations as JSONL")
    p.add_argument("file")
    p.add_argument("--repair", action="store_true", help="repair instead of failing")
    p.add_argument("--out", help="write the repaired corpus here (with --repair)")
    _fmt_args(p)
    p.set_defaults(fn=cmd_parse_check)

    p = sub.add_parser("detect", help="flag suspicious mentions by token-frequency divergence")
    p.add_argument("--train", required=True, help="reference partition")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--target", help="partition to flag against the reference")
    group.add_argument("--cv", type=int, help="cross-validate the reference itself with k folds")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="candidates JSONL")
    _fmt_args(p)
    p.set_defaults(fn=cmd_detect)

    p = sub.add_parser("pairs", help="frequency-ranked (mention, type) pairs as TSV")
    p.add_argument("--in", dest="in", required=True)
    p.add_argument("--types", help="comma-separated entity type filter")
    p.add_argument("--top", type=int, help="keep the n most frequent")
    p.add_argument("--out")
    _fmt_args(p)
    p.set_defaults(fn=cmd_pairs)

    p = sub.add_parser("rules", help="rule-based proposals: scan, apply, interactive")
    rules_sub = p.add_subparsers(dest="rules_cmd", required=True)

    q = rules_sub.add_parser("scan", help="generate edit proposals")
    q.add_argument("--in", dest="in", required=True)
    q.add_argument("--out", required=True, help="proposals JSONL")
    q.add_argument("--candidates", help="also write review-only candidates JSONL")
    q.add_argument(
        "--rules", help=f"comma-separated subset of: {','.join(DEFAULT_RULES)}"
    )
    _fmt_args(q)
    q.set_defaults(fn=cmd_rules_scan)

    q = rules_sub.add_parser("apply", help="replay decided proposals over a corpus")
    q.add_argument("--in", dest="in", required=True)
    q.add_argument("--proposals", required=True)
    q.add_argument("--log", required=True, help="decision log JSONL")
    q.add_argument("--out", required=True, help="corrected corpus file")
    q.add_argument("--report", help="replay report JSON")
    _fmt_args(q)
    q.set_defaults(fn=cmd_rules_apply)

    q = rules_sub.add_parser("interactive", help="terminal accept/reject loop")
    q.add_argument("--in", dest="in", required=True)
    q.add_argument("--proposals", required=True)
    q.add_argument("--log", required=True)
    q.add_argument("--actor", default="reviewer")
    _fmt_args(q)
    q.set_defaults(fn=cmd_rules_interactive)

    p = sub.add_parser("diff", help="change statistics between two corpus versions")
    p.add_argument("--old", required=True)
    p.add_argument("--new", required=True)
    p.add_argument("--out", help="report JSON")
    p.add_argument("--table", action="store_true", help="print aligned text tables")
    _fmt_args(p)
    p.set_defaults(fn=cmd_diff)

    p = sub.add_parser("score", help="span-level exact-match micro-F1")
    score_sub = p.add_subparsers(dest="score_cmd")
    p.add_argument("--gold")
    p.add_argument("--pred")
    p.add_argument("--out")
    _fmt_args(p)
    p.set_defaults(fn=cmd_score, score_cmd=None)

    q = score_sub.add_parser("compare", help="delta and relative error reduction")
    q.add_argument("--old", required=True, help="score JSON of the baseline run")
    q.add_argument("--new", required=True, help="score JSON of the comparison run")
    q.add_argument("--per-type", action="store_true")
    q.add_argument("--out")
    q.set_defaults(fn=cmd_score, score_cmd="compare")

    p = sub.add_parser("serve", help="run the local review service")
    p.add_argument("--corpus", required=True)
    p.add_argument("--candidates", help="candidates JSONL from detect/scan")
    p.add_argument("--proposals", help="proposals JSONL from rules scan")
    p.add_argument("--log", required=True, help="append-only decision log")
    p.add_argument("--port", type=int, default=8400)
    p.add_argument("--actor", default="reviewer")
    p.add_argument("--ui-dir", help="directory of built frontend assets")
    p.add_argument("--out-dir", help="where export writes files (default: log directory)")
    p.add_argument("--verbose", action="store_true")
    _fmt_args(p)
    p.set_defaults(fn=cmd_serve)

    p = sub.add_parser("synth", help="generate a synthetic corpus for demos/benchmarks")
    p.add_argument("--tokens", type=int, required=True)
    p.add_argument("--docs", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--partition", default="train")
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_synth)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except CorpusParseError as exc:
        for v in exc.violations:
            print(json.dumps(v.to_json(), ensure_ascii=False), file=sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
