"""Command-line entry point: ``export-weights --model NAME --out DIR``."""

from __future__ import annotations

import argparse
import sys

from .export import MODEL_BUILDERS, export_model


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="export-weights",
        description="Export a torchvision model's linear layers to NPY files "
        "plus a manifest.json for the lowrank CLI.",
    )
    parser.add_argument("--model", required=True, choices=sorted(MODEL_BUILDERS))
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument(
        "--no-pretrained",
        action="store_true",
        help="export the fresh initialization instead of downloading weights "
        "(shapes and parameter counts only make sense; useful offline)",
    )
    args = parser.parse_args(argv)

    try:
        manifest = export_model(args.model, args.out, pretrained=not args.no_pretrained)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # zoo download or I/O failure
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(
        f"exported {len(manifest['layers'])} linear layers of {args.model} "
        f"to {args.out}/manifest.json"
    )
    return 0


if __name__ == "__main__":
    sys.exit(main())
