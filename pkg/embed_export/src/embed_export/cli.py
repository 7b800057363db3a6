"""Command line for the contextual embedding exporter.

    embed-export --dataset D.csv --model M --out F [--layer last] [--pool first]

A leading literal ``export`` argument is accepted too. Exit codes:
0 success, 1 usage or model-load failure, 2 data/alignment error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from trimine.text_prep import DatasetFormatError

from .export import AlignmentError, ExportConfig, ModelLoadError, export_contextual


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="embed-export",
        description="Export frozen contextual token embeddings for a dataset CSV "
                    "in the trimine contextual-store JSON Lines format.")
    parser.add_argument("--dataset", required=True, help="dataset CSV (labels optional)")
    parser.add_argument("--model", required=True,
                        help="pretrained model identifier or local path")
    parser.add_argument("--out", required=True, help="output JSONL path")
    parser.add_argument("--layer", default="last",
                        help="hidden layer to export: 'last' or an index (default last)")
    parser.add_argument("--pool", default="first", choices=["first", "mean"],
                        help="subtoken-to-token pooling policy (default first)")
    parser.add_argument("--batch-size", type=int, default=8)
    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if argv[:1] == ["export"]:
        argv = argv[1:]
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return 0 if e.code in (0, None) else 1
    if not Path(args.dataset).exists():
        print(f"error: dataset not found: {args.dataset}", file=sys.stderr)
        return 1
    try:
        cfg = ExportConfig(dataset=Path(args.dataset), model=args.model,
                           output=Path(args.out), layer=args.layer,
                           pool=args.pool, batch_size=args.batch_size)
        stats = export_contextual(cfg)
    except ModelLoadError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except (AlignmentError, DatasetFormatError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    print(f"wrote {stats['sentences']} sentences x {stats['dim']}d to {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
