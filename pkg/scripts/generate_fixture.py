#!/usr/bin/env python3
"""Write the synthetic ranking benchmark (corpus/topics/qrels) to a directory."""

import argparse

from seqrank.fixtures import generate_fixture, write_fixture_files


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="fixture", help="output directory")
    parser.add_argument("--topics", type=int, default=20)
    parser.add_argument("--inversions", type=int, default=15)
    parser.add_argument("--fillers", type=int, default=160)
    parser.add_argument("--seed", type=int, default=13)
    args = parser.parse_args()

    fixture = generate_fixture(
        n_topics=args.topics,
        n_inversions=args.inversions,
        n_fillers=args.fillers,
        seed=args.seed,
    )
    paths = write_fixture_files(fixture, args.out)
    print(f"{len(fixture.documents)} documents, {len(fixture.topics)} topics")
    print(f"bag-of-words inversions built in: {len(fixture.inversion_topics)} topics")
    for name, path in paths.items():
        print(f"  {name}: {path}")


if __name__ == "__main__":
    main()
