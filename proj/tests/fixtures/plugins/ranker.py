#!/usr/bin/env python3
"""Line-protocol chunk ranker: {"target","candidate","chunks"} -> {"scores"}.

Scores each chunk by ascending position, which exactly reverses the host's
positional ordering -- handy for asserting that ranker output is honored.
"""
import json
import sys

for line in sys.stdin:
    req = json.loads(line)
    print(json.dumps({"scores": list(range(len(req.get("chunks", []))))}), flush=True)
