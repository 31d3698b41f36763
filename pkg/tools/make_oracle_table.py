#!/usr/bin/env python3
"""Write a random oracle table that is total on all words up to a length."""

import argparse
import random
import sys
from itertools import product
from pathlib import Path
from typing import Optional, Sequence

from src.config import SEED
from src.logging_config import get_logger, setup_logging
from src.sopoly import OracleTable, format_otab

logger = get_logger(__name__)


def all_words(max_len: int) -> list[str]:
    words = []
    for length in range(max_len + 1):
        words.extend(''.join(bits) for bits in product('01', repeat=length))
    return words


def random_table(max_query: int, max_answer: int, seed: int = SEED,
                 default: Optional[str] = None) -> OracleTable:
    rng = random.Random(seed)
    mapping = {
        query: ''.join(rng.choice('01') for _ in range(rng.randint(0, max_answer)))
        for query in all_words(max_query)
    }
    return OracleTable(mapping, default)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = argparse.ArgumentParser(description="Generate a random .otab oracle table")
    parser.add_argument("output", type=str, help="Path of the .otab file to write")
    parser.add_argument("--max-query", type=int, default=3, help="Table is total on words up to this length")
    parser.add_argument("--max-answer", type=int, default=3, help="Longest answer word")
    parser.add_argument("--seed", type=int, default=SEED)
    parser.add_argument("--default", type=str, default=None, help="Answer for every other query")
    args = parser.parse_args(argv)
    setup_logging()

    default = '' if args.default == '_' else args.default
    table = random_table(args.max_query, args.max_answer, args.seed, default)
    path = Path(args.output)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(format_otab(table), encoding='utf-8')
    logger.info(f"Wrote {len(table.mapping)} entries to {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
