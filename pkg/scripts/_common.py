"""Shared argument handling for the experiment scripts."""
import argparse

from trc.experiments import format_summary, write_jsonl


def parser(doc):
    ap = argparse.ArgumentParser(description=doc)
    ap.add_argument("--jsonl", help="write line-delimited records here")
    ap.add_argument("--workers", type=int, default=1)
    return ap


def finish(results, args):
    print(format_summary(results))
    if args.jsonl:
        write_jsonl(results, args.jsonl)
