"""Text formats: model files, BFG metadata sidecars and evidence files.

The grammar is documented in ``docs/model-format.md``.  All three formats are
line based; ``#`` starts a comment and blank lines are ignored.
"""
from __future__ import annotations

import re
from pathlib import Path

import numpy as np

from .errors import FormatError
from .factorize import BfgMetadata
from .model import CPT, DiscreteNetwork, Evidence, VariableDecl

MODEL_HEADER = "trc-model"
META_HEADER = "trc-meta"
VERSION = 1
_TOKEN = re.compile(r"^[^\s#|:=]+$")


def _lines(text):
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield no, line


def _check_token(tok, what):
    if not _TOKEN.match(str(tok)):
        raise FormatError(f"{what} {tok!r} cannot be written: no whitespace or any of '#|:=' allowed")
    return str(tok)


def _header(lines, expect):
    try:
        no, line = next(lines)
    except StopIteration:
        raise FormatError("empty file") from None
    parts = line.split()
    if len(parts) != 2 or parts[0] != expect:
        raise FormatError(f"line {no}: expected header '{expect} {VERSION}'")
    if parts[1] != str(VERSION):
        raise FormatError(f"line {no}: unsupported {expect} version {parts[1]}")


# models -------------------------------------------------------------------

def dumps_model(net: DiscreteNetwork) -> str:
    out = [f"{MODEL_HEADER} {VERSION}", f"network {_check_token(net.name, 'network name')}", ""]
    for v in net.variables:
        kind = " intermediate" if v.kind == "intermediate" else ""
        states = " ".join(_check_token(s, "state") for s in v.states)
        out.append(f"variable {_check_token(v.name, 'variable')}{kind} : {states}")
    for c in net.cpts:
        out.append("")
        out.append(f"cpt {c.child} | {' '.join(c.parents)}".rstrip())
        for row in c.rows:
            out.append("  " + " ".join(repr(float(x)) for x in row))
    return "\n".join(out) + "\n"


def loads_model(text: str) -> DiscreteNetwork:
    lines = _lines(text)
    _header(lines, MODEL_HEADER)
    name = "net"
    decls, blocks, current = [], [], None
    for no, line in lines:
        head, _, rest = line.partition(" ")
        if head == "network":
            name = rest.strip()
            current = None
        elif head == "variable":
            left, colon, states = rest.partition(":")
            bits = left.split()
            if not colon or not bits or len(bits) > 2 or (len(bits) == 2 and bits[1] != "intermediate"):
                raise FormatError(f"line {no}: expected 'variable NAME [intermediate] : STATE ...'")
            decls.append(VariableDecl(bits[0], tuple(states.split()),
                                      "intermediate" if len(bits) == 2 else "original"))
            current = None
        elif head == "cpt":
            child, bar, parents = rest.partition("|")
            if not child.strip() or len(child.split()) != 1:
                raise FormatError(f"line {no}: expected 'cpt CHILD | PARENT ...'")
            current = [child.strip(), tuple(parents.split()), [], no]
            blocks.append(current)
        else:
            if current is None:
                raise FormatError(f"line {no}: probabilities outside a cpt block")
            try:
                current[2].extend(float(x) for x in line.split())
            except ValueError:
                raise FormatError(f"line {no}: not a number in {line!r}") from None
    cards = {d.name: d.card for d in decls}
    cpts = []
    for child, parents, values, no in blocks:
        for v in (child,) + parents:
            if v not in cards:
                raise FormatError(f"line {no}: cpt mentions undeclared variable {v!r}")
        shape = tuple(cards[p] for p in parents) + (cards[child],)
        if len(values) != int(np.prod(shape)):
            raise FormatError(f"line {no}: cpt {child} needs {int(np.prod(shape))} numbers, got {len(values)}")
        cpts.append(CPT(child, parents, np.array(values).reshape(shape)))
    return DiscreteNetwork(tuple(decls), tuple(cpts), name=name)


def read_model(path) -> DiscreteNetwork:
    return loads_model(Path(path).read_text())


def write_model(net: DiscreteNetwork, path):
    Path(path).write_text(dumps_model(net))


# metadata sidecars ----------------------------------------------------------

def dumps_metadata(meta: BfgMetadata) -> str:
    out = [f"{META_HEADER} {VERSION}", f"ordering {' '.join(meta.ordering)}"]
    out += [f"card {s} = {k}" for s, k in meta.source_cards.items()]
    out += [f"origin {v} = {' '.join(src)}" for v, src in meta.origin_map.items()]
    out += [f"carries {v} = {' '.join(src)}" for v, src in meta.carries.items()]
    out += [f"replicas {s} = {' '.join(reps)}".rstrip() for s, reps in meta.replica_groups.items()]
    return "\n".join(out) + "\n"


def loads_metadata(text: str) -> BfgMetadata:
    lines = _lines(text)
    _header(lines, META_HEADER)
    meta = BfgMetadata()
    for no, line in lines:
        head, _, rest = line.partition(" ")
        if head == "ordering":
            meta.ordering = rest.split()
            continue
        key, eq, val = rest.partition("=")
        key = key.strip()
        if not eq or not key:
            raise FormatError(f"line {no}: expected '{head} NAME = ...'")
        vals = val.split()
        if head == "card":
            meta.source_cards[key] = int(vals[0])
        elif head == "origin":
            meta.origin_map[key] = tuple(vals)
        elif head == "carries":
            meta.carries[key] = tuple(vals)
        elif head == "replicas":
            meta.replica_groups[key] = list(vals)
        else:
            raise FormatError(f"line {no}: unknown record {head!r}")
    return meta


def write_metadata(meta: BfgMetadata, path):
    Path(path).write_text(dumps_metadata(meta))


def read_metadata(path) -> BfgMetadata:
    return loads_metadata(Path(path).read_text())


# evidence ---------------------------------------------------------------------

def loads_evidence(text: str, net: DiscreteNetwork) -> Evidence:
    """``name=state`` pairs (state labels), one or more per line."""
    labels = {}
    for no, line in _lines(text):
        for pair in line.replace(",", " ").split():
            name, eq, state = pair.partition("=")
            if not eq or not name or not state:
                raise FormatError(f"line {no}: expected name=state, got {pair!r}")
            labels[name] = state
    return Evidence.from_labels(net, labels)


def read_evidence(path, net: DiscreteNetwork) -> Evidence:
    return loads_evidence(Path(path).read_text(), net)


def dumps_evidence(evidence: Evidence, net: DiscreteNetwork) -> str:
    return "".join(f"{k}={net.var(k).states[int(s)]}\n" for k, s in evidence.items())
