#!/usr/bin/env python3
"""Regenerate the committed golden XML/sexp files from the curated snippets.

Run from the repository root:  python scripts/gen_goldens.py
Review the diff by hand before committing; the goldens pin the serialization
formats byte for byte.
"""

import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "tests"))

from codemine.analyzer import ast_to_sexp, ast_to_xml, parse_source
from codemine.model import Language

from golden_snippets import SNIPPETS


def main() -> None:
    out_dir = ROOT / "tests" / "goldens"
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, (lang, source) in sorted(SNIPPETS.items()):
        tree = parse_source(source, Language(lang))
        if tree.has_errors:
            raise SystemExit(f"snippet {name} does not parse cleanly")
        (out_dir / f"{name}.xml").write_text(ast_to_xml(tree) + "\n", encoding="utf-8")
        (out_dir / f"{name}.sexp").write_text(ast_to_sexp(tree) + "\n", encoding="utf-8")
        print(f"wrote goldens for {name}")


if __name__ == "__main__":
    main()
