"""Service CLI: `serve` runs the HTTP scorer, `finetune` trains a checkpoint."""

from __future__ import annotations

import argparse
import logging
import sys


def _cmd_serve(args) -> int:
    import uvicorn

    from .app import create_app
    from .model import ServiceConfig

    config = ServiceConfig(
        model=args.model,
        max_input_tokens=args.max_input_tokens,
        host=args.host,
        port=args.port,
        batch_limit=args.batch_limit,
    )
    app = create_app(config)
    uvicorn.run(app, host=config.host, port=config.port, log_level="info")
    return 0


def _cmd_finetune(args) -> int:
    from .finetune import FinetuneConfig, finetune

    config = FinetuneConfig(
        model=args.model,
        positive=args.positive,
        negative=args.negative,
        batch_size=args.batch_size,
        steps=args.steps,
        learning_rate=args.lr,
        seed=args.seed,
        max_input_tokens=args.max_input_tokens,
        output_dir=args.out,
    )
    out_dir = finetune(args.train, config)
    print(f"checkpoint written to {out_dir}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="seqrank-service", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("serve", help="run the scoring service")
    p.add_argument("--model", default="tiny", help='"tiny" or a checkpoint directory')
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8390)
    p.add_argument("--max-input-tokens", type=int, default=512)
    p.add_argument("--batch-limit", type=int, default=64)
    p.set_defaults(func=_cmd_serve)

    p = sub.add_parser("finetune", help="fine-tune toward a target-word pair")
    p.add_argument("--train", required=True, help="TSV of query, document, label")
    p.add_argument("--out", required=True, help="checkpoint directory")
    p.add_argument("--model", default="tiny")
    p.add_argument("--positive", default="true")
    p.add_argument("--negative", default="false")
    p.add_argument("--batch-size", type=int, default=128)
    p.add_argument("--steps", type=int, default=16)
    p.add_argument("--lr", type=float, default=1e-3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-input-tokens", type=int, default=512)
    p.set_defaults(func=_cmd_finetune)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        sys.stderr.write(f"seqrank-service: error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
