#!/usr/bin/env python3
# Copyright 2026 The medex Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Builds a med-1 annotated document from section text and bracketed trees.

The input is a JSON file:

  {"title": str, "lead": str?, "body": str, "publish_date": str?,
   "sentences": [{"section": "title"|"lead"|"body", "tree": "(ROOT ...)"}],
   "coref": [{"mentions": [[sentence, begin, end], ...], "representative": 0}]}

Tree leaves are written word|NER|lemma; NER defaults to O and the lemma to
the lowercased word. Character offsets are found by scanning the section
text left to right, so every word must occur there verbatim.
"""

import argparse
import json
import re
import sys

_ATOM = re.compile(r"[^\s()]+")


def parse_tree(text):
    """Returns (node, leaves) with leaves as (tag, word, ner, lemma)."""
    pos = 0
    leaves = []

    def skip():
        nonlocal pos
        while pos < len(text) and text[pos].isspace():
            pos += 1

    def atom():
        nonlocal pos
        m = _ATOM.match(text, pos)
        if not m:
            raise ValueError(f"expected atom at {pos}")
        pos = m.end()
        return m.group(0)

    def node():
        nonlocal pos
        skip()
        if text[pos] != "(":
            raise ValueError(f"expected '(' at {pos}")
        pos += 1
        skip()
        label = "" if text[pos] == "(" else atom()
        skip()
        if text[pos] not in "()":
            word, *rest = atom().split("|")
            ner = rest[0] if rest and rest[0] else "O"
            lemma = rest[1] if len(rest) > 1 else word.lower()
            out = {"label": label, "token": len(leaves)}
            leaves.append((label, word, ner, lemma))
        else:
            kids = []
            while True:
                skip()
                if text[pos] == ")":
                    break
                kids.append(node())
            out = {"label": label or "ROOT", "children": kids}
        skip()
        if text[pos] != ")":
            raise ValueError(f"expected ')' at {pos}")
        pos += 1
        return out

    root = node()
    return root, leaves


def build(spec):
    cursors = {"title": 0, "lead": 0, "body": 0}
    sentences = []
    for i, s in enumerate(spec["sentences"]):
        section = s["section"]
        text = spec[section]
        tree, leaves = parse_tree(s["tree"])
        tokens = []
        for tag, word, ner, lemma in leaves:
            at = text.find(word, cursors[section])
            if at < 0:
                raise ValueError(f"sentence {i}: '{word}' not found in {section}")
            start = len(text[:at].encode("utf-8"))
            end = start + len(word.encode("utf-8"))
            cursors[section] = at + len(word)
            tokens.append({"text": word, "lemma": lemma, "pos": tag, "ner": ner,
                           "char_begin": start, "char_end": end})
        sentences.append({"tokens": tokens, "parse": tree, "section": section})
    doc = {"version": "med-1", "title": spec["title"]}
    if spec.get("lead") is not None:
        doc["lead"] = spec["lead"]
    doc["body"] = spec["body"]
    if spec.get("publish_date"):
        doc["publish_date"] = spec["publish_date"]
    doc["sentences"] = sentences
    if "coref" in spec:
        doc["coref"] = [
            {"mentions": [{"sentence": m[0], "begin": m[1], "end": m[2]}
                          for m in c["mentions"]],
             "representative": c.get("representative", 0)}
            for c in spec["coref"]
        ]
    return doc


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("spec", help="input JSON spec")
    ap.add_argument("-o", "--out", help="output file (default stdout)")
    args = ap.parse_args(argv)
    with open(args.spec, encoding="utf-8") as f:
        doc = build(json.load(f))
    text = json.dumps(doc, indent=1, ensure_ascii=False) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


if __name__ == "__main__":
    main()
