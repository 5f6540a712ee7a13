#!/usr/bin/env python3
"""Line-protocol entity extractor: {"text": ...} -> {"spans": [...]}.

Emits every maximal run of words that start with an uppercase letter or a
digit; the host filters spans against its own name list afterwards.
"""
import json
import sys


def spans_of(text):
    out, run = [], []
    for word in text.split():
        token = word.strip(".,;:()[]\"'!?")
        if token and (token[0].isupper() or token[0].isdigit()):
            run.append(token)
        else:
            if run:
                out.append(" ".join(run))
            run = []
    if run:
        out.append(" ".join(run))
    # also emit each tail of every run so multi-word names align
    tails = []
    for span in out:
        words = span.split()
        for i in range(len(words)):
            for j in range(i + 1, len(words) + 1):
                tails.append(" ".join(words[i:j]))
    return tails


for line in sys.stdin:
    req = json.loads(line)
    print(json.dumps({"spans": spans_of(req.get("text", ""))}), flush=True)
