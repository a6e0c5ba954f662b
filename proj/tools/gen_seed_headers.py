#!/usr/bin/env python3
# Copyright 2026 The jsconform Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Regenerates data/seed_headers.txt, the corpus of function headers the
built-in generator starts programs from. Output is deterministic."""

import random
import sys

VERBS = ["get", "set", "make", "build", "parse", "check", "compute", "find",
         "load", "format", "convert", "test", "run", "apply", "merge", "split",
         "count", "update", "render", "handle", "create", "read", "write",
         "filter", "sort", "scan", "map", "reduce", "pick", "encode"]
NOUNS = ["Value", "Item", "Name", "List", "Data", "Text", "Node", "Index",
         "Range", "Key", "Entry", "Token", "Number", "String", "Array",
         "Object", "Digits", "Prefix", "Offset", "Result"]
SHORT = ["foo", "bar", "baz", "qux", "f", "g", "h", "fn", "test", "main",
         "run", "check", "helper", "util", "a", "b", "c", "x", "cb", "go"]
PARAMS = ["str", "start", "len", "num", "digits", "arr", "obj", "x", "y",
          "a", "b", "c", "assert", "value", "options", "callback", "index",
          "count", "key", "text", "n", "radix", "separator", "input", "list",
          "target", "source", "data", "item", "s", "end", "pos", "flag"]

FIXED = ["var a = function(assert) {", "function foo(str, start, len) {"]


def header(rng):
    form = rng.random()
    if rng.random() < 0.4:
        name = rng.choice(SHORT)
    else:
        name = rng.choice(VERBS) + rng.choice(NOUNS)
    count = rng.choices([0, 1, 2, 3, 4], weights=[1, 4, 4, 3, 1])[0]
    params = rng.sample(PARAMS, count)
    if name in params:
        params.remove(name)
    plist = ", ".join(params)
    if form < 0.55:
        return "function %s(%s) {" % (name, plist)
    if form < 0.85:
        return "var %s = function(%s) {" % (name, plist)
    return "var %s = function %s(%s) {" % (name, name + "Impl", plist)


def main():
    rng = random.Random(20200614)
    seen = set(FIXED)
    out = list(FIXED)
    while len(out) < 2000:
        h = header(rng)
        if h not in seen:
            seen.add(h)
            out.append(h)
    sys.stdout.write("\n".join(out) + "\n")


if __name__ == "__main__":
    main()
