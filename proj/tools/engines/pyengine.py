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

"""Runs a script file on a JS engine embedded in Python, shaped like a
command-line shell: `print` writes a line to stdout, an uncaught exception
is reported on stderr with exit status 1, and a script that does not
compile exits with status 2 after the JSCONFORM-PARSE-ERROR marker.

    pyengine.py --engine quickjs|dukpy FILE
"""

import argparse
import json
import sys

PARSE_MARKER = "JSCONFORM-PARSE-ERROR"


class QuickJs:
    def __init__(self):
        import quickjs
        self.error = quickjs.JSException
        self.ctx = quickjs.Context()
        self.ctx.add_callable("__host_print", _emit)
        self.ctx.eval("var print = function () {"
                      " __host_print(Array.prototype.join.call(arguments, ' ')); };")

    def eval(self, src):
        self.ctx.eval(src)


class DukPy:
    def __init__(self):
        import dukpy
        self.error = dukpy.JSRuntimeError
        self.interp = dukpy.JSInterpreter()
        self.interp.export_function("print", _emit)
        self.interp.evaljs("var print = (function (host) { return function () {"
                           " host('print', Array.prototype.join.call(arguments, ' '));"
                           " }; })(call_python);")

    def eval(self, src):
        # The completion value is converted to Python; keep it convertible.
        self.interp.evaljs(src + "\n;null")


ENGINES = {"quickjs": QuickJs, "dukpy": DukPy}


def _emit(text):
    sys.stdout.write(str(text) + "\n")
    sys.stdout.flush()


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--engine", choices=sorted(ENGINES), required=True)
    ap.add_argument("file")
    args = ap.parse_args()
    with open(args.file, encoding="utf-8") as f:
        src = f.read()
    engine = ENGINES[args.engine]()
    # Compile without running: a function body parses as a script does for
    # the programs we feed it (no top-level return).
    try:
        engine.eval("new Function(%s);" % json.dumps(src))
    except engine.error as e:
        if str(e).startswith("SyntaxError"):
            sys.stderr.write("%s\n%s\n" % (PARSE_MARKER, e))
            return 2
        raise
    try:
        engine.eval(src)
    except engine.error as e:
        sys.stderr.write("Uncaught %s\n" % e)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
