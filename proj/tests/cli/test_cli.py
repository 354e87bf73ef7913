#!/usr/bin/env python3
"""End-to-end checks for the ultrashift command line tool.

usage: test_cli.py <ultrashift binary> <source dir>
"""

import csv
import io
import json
import os
import subprocess
import sys
import tempfile
import unittest

import jsonschema

if len(sys.argv) < 3:
    sys.exit(__doc__)
BINARY = os.path.abspath(sys.argv[1])
FIXTURES = os.path.join(sys.argv[2], "fixtures")

DIAGNOSTIC = {
    "type": "object",
    "required": ["code", "message", "line", "column"],
    "properties": {
        "code": {"type": "string", "pattern": "^E-[A-Z-]+$"},
        "message": {"type": "string"},
        "line": {"type": "integer", "minimum": 0},
        "column": {"type": "integer", "minimum": 0},
    },
    "additionalProperties": False,
}

SCHEMA = {
    "type": "object",
    "required": ["schema", "command", "input", "exit"],
    "properties": {
        "schema": {"const": "ultrashift/1"},
        "command": {
            "enum": ["analyze", "cp", "pair-check", "scrambled-sample", "trajectory", "metric", "enum-p", "emitters"]
        },
        "input": {"type": "string"},
        "exit": {"enum": [0, 1, 2]},
        "result": {"type": "object"},
        "diagnostics": {"type": "array", "items": DIAGNOSTIC, "minItems": 1},
    },
    "oneOf": [
        {"required": ["result"], "not": {"required": ["diagnostics"]}, "properties": {"exit": {"enum": [0, 2]}}},
        {"required": ["diagnostics"], "not": {"required": ["result"]}, "properties": {"exit": {"const": 1}}},
    ],
    "additionalProperties": False,
}

DISTANCE = {
    "type": "object",
    "required": ["kind", "rank", "value", "valueText"],
    "properties": {
        "kind": {"enum": ["zero", "rank", "unknown-beyond"]},
        "rank": {"type": "integer", "minimum": -1},
        "value": {"type": ["number", "null"]},
        "valueText": {"type": "string"},
    },
}

UNKNOWN_GRAPH = (
    "vertexfamily u;\n"
    "edgefamily e(k) { source u[k]; range k % 2 == 0 => { u[k+1] }; range k % 2 == 1 => { u[k-1] }; }\n"
)

LONG_PREFIX = ".".join(["a[0]"] * 8)


def fixture(name):
    return os.path.join(FIXTURES, name)


def run(*args, env_bounds=None):
    env = dict(os.environ)
    env.pop("ULTRASHIFT_DEFAULT_BOUNDS", None)
    if env_bounds is not None:
        env["ULTRASHIFT_DEFAULT_BOUNDS"] = env_bounds
    return subprocess.run([BINARY, *args], capture_output=True, text=True, env=env, timeout=300)


def fields(text):
    out = {}
    for line in text.splitlines():
        key, sep, value = line.partition(": ")
        if sep:
            out.setdefault(key, value)
    return out


class JsonDocuments(unittest.TestCase):
    CASES = [
        (["analyze", fixture("fanout.ug")], 0),
        (["analyze", fixture("twoloops.ug")], 0),
        (["cp", fixture("twoloops.ug"), "--vertex", "w[0]"], 0),
        (["pair-check", fixture("fanout.ug"), "--x", "tail:e[0]|e@2", "--y", "fin:|r(e[0])"], 0),
        (["scrambled-sample", fixture("loopcycle.ug"), "--count", "3", "--family", "sdoubleprime"], 0),
        (["trajectory", fixture("fanout.ug"), "--x", "tail:f[0]|e@1", "--y", "fin:|r(e[0])", "--n-max", "6"], 0),
        (["metric", fixture("twoloops.ug"), "--x", "ep:|a[0]", "--y", "ep:|b[0]"], 0),
        (["enum-p", fixture("fanout.ug"), "--count", "12"], 0),
        (["emitters", fixture("fanout.ug"), "--path", "e[0]"], 0),
        (["analyze", fixture("nonaffine.ug")], 1),
        (["scrambled-sample", fixture("fanout.ug")], 1),
        (["metric", fixture("twoloops.ug"), "--x", "ep:|q[0]", "--y", "ep:|a[0]"], 1),
        (["metric", fixture("loopcycle.ug"), "--x", "ep:" + LONG_PREFIX + "|g[0].h[0]", "--y", "ep:|a[0]",
          "--max-rank", "20"], 2),
    ]

    def test_documents_validate(self):
        for args, code in self.CASES:
            with self.subTest(args=args):
                p = run(*args, "--json")
                self.assertEqual(p.returncode, code, p.stderr)
                doc = json.loads(p.stdout)
                jsonschema.validate(doc, SCHEMA)
                self.assertEqual(doc["command"], args[0])
                self.assertEqual(doc["exit"], code)

    def test_reruns_are_byte_identical(self):
        for args, _ in self.CASES:
            with self.subTest(args=args):
                for extra in ([], ["--json"]):
                    a, b = run(*args, *extra), run(*args, *extra)
                    self.assertEqual(a.stdout, b.stdout)
                    self.assertEqual(a.stderr, b.stderr)

    def test_distance_results(self):
        p = run("metric", fixture("twoloops.ug"), "--x", "ep:|a[0]", "--y", "ep:|b[0]", "--json")
        r = json.loads(p.stdout)["result"]
        jsonschema.validate(r, DISTANCE)
        self.assertEqual((r["kind"], r["rank"], r["value"], r["valueText"]), ("rank", 2, 0.25, "0.25"))
        p = run("metric", fixture("twoloops.ug"), "--x", "ep:|a[0]", "--y", "ep:|a[0]", "--json")
        r = json.loads(p.stdout)["result"]
        self.assertEqual((r["kind"], r["rank"]), ("zero", -1))

    def test_trajectory_rows(self):
        p = run("trajectory", fixture("fanout.ug"), "--x", "tail:f[0]|e@1", "--y", "fin:|r(e[0])",
                "--n-max", "6", "--json")
        rows = json.loads(p.stdout)["result"]["rows"]
        self.assertEqual([r["n"] for r in rows], list(range(7)))
        for r in rows:
            jsonschema.validate({**r, "kind": "rank"}, DISTANCE)


class ExitCodes(unittest.TestCase):
    def test_success(self):
        self.assertEqual(run("analyze", fixture("twoloops.ug")).returncode, 0)
        self.assertEqual(run("enum-p", fixture("loopcycle.ug"), "--count", "5").returncode, 0)

    def test_diagnostics(self):
        self.assertEqual(run("analyze", fixture("missing.ug")).returncode, 1)
        p = run("analyze", fixture("nonaffine.ug"))
        self.assertEqual(p.returncode, 1)
        self.assertIn("E-AFFINE", p.stderr)
        p = run("pair-check", fixture("fanout.ug"), "--x", "tail:e[0]|", "--y", "fin:|r(e[0])")
        self.assertEqual(p.returncode, 1)
        p = run("scrambled-sample", fixture("fanout.ug"))
        self.assertEqual(p.returncode, 1)
        self.assertIn("E-PRECONDITION", p.stderr)

    def test_unknown(self):
        p = run("pair-check", fixture("loopcycle.ug"), "--x", "bcode:w[0]|a[0]|g[0].h[0]|f(nat)",
                "--y", "bcode:w[0]|a[0]|g[0].h[0]|f(1,3,shift:4)")
        self.assertEqual(p.returncode, 2)
        self.assertEqual(fields(p.stdout)["verdict"], "Unknown")
        p = run("metric", fixture("loopcycle.ug"), "--x", "ep:" + LONG_PREFIX + "|g[0].h[0]", "--y", "ep:|a[0]",
                "--max-rank", "20")
        self.assertEqual(p.returncode, 2)
        self.assertEqual(fields(p.stdout)["rank"], "0")
        with tempfile.TemporaryDirectory() as d:
            path = os.path.join(d, "unknown.ug")
            with open(path, "w") as f:
                f.write(UNKNOWN_GRAPH)
            p = run("analyze", path, "--length-bound", "6", "--index-bound", "6")
            self.assertEqual(p.returncode, 2)
            self.assertEqual(fields(p.stdout)["verdict"], "Unknown")


class TextRecords(unittest.TestCase):
    def test_analyze_fields(self):
        f = fields(run("analyze", fixture("twoloops.ug")).stdout)
        for key in ("verdict", "vertex", "c1", "c2", "certificate", "bounds", "criteria"):
            self.assertIn(key, f)
        self.assertEqual(f["verdict"], "Chaotic")
        self.assertEqual(f["vertex"], "w[0]")
        self.assertNotEqual(f["c1"], f["c2"])
        g = fields(run("analyze", fixture("fanout.ug")).stdout)
        self.assertEqual(g["verdict"], "NotChaotic")
        self.assertTrue(g["certificate"].startswith("Grading"))

    def test_pair_check_fields(self):
        f = fields(run("pair-check", fixture("fanout.ug"), "--x", "tail:e[0]|e@2", "--y", "fin:|r(e[0])").stdout)
        for key in ("verdict", "certificate", "criteria"):
            self.assertIn(key, f)
        self.assertEqual(f["verdict"], "scrambled")
        g = fields(run("pair-check", fixture("twoloops.ug"), "--x", "ep:|a[0]", "--y", "ep:|b[0]").stdout)
        self.assertEqual(g["verdict"], "not-scrambled")
        self.assertEqual(g["criteria"], "limsup=recurring-edge liminf=none")

    def test_output_file(self):
        with tempfile.TemporaryDirectory() as d:
            path = os.path.join(d, "out.txt")
            p = run("analyze", fixture("twoloops.ug"), "-o", path)
            self.assertEqual(p.returncode, 0)
            self.assertEqual(p.stdout, "")
            with open(path) as f:
                self.assertEqual(f.read(), run("analyze", fixture("twoloops.ug")).stdout)


class TrajectoryCsv(unittest.TestCase):
    def test_header_and_conventions(self):
        p = run("trajectory", fixture("twoloops.ug"), "--x", "ep:a[0]|b[0]", "--y", "ep:|b[0]", "--n-max", "4")
        self.assertEqual(p.returncode, 0)
        rows = list(csv.reader(io.StringIO(p.stdout)))
        self.assertEqual(rows[0], ["n", "rank", "value"])
        self.assertEqual([int(r[0]) for r in rows[1:]], list(range(5)))
        self.assertNotEqual(rows[1][1], "-1")
        for r in rows[2:]:
            self.assertEqual(r[1:], ["-1", "0"])

    def test_beyond_is_rank_zero(self):
        p = run("trajectory", fixture("loopcycle.ug"), "--x", "ep:" + LONG_PREFIX + "|g[0].h[0]", "--y", "ep:|a[0]",
                "--n-max", "2", "--max-rank", "20")
        rows = list(csv.reader(io.StringIO(p.stdout)))[1:]
        self.assertEqual(rows[0][1:], ["0", "0"])
        for r in rows:
            self.assertGreaterEqual(int(r[1]), 0)

    def test_values_are_powers_of_two(self):
        p = run("trajectory", fixture("fanout.ug"), "--x", "tail:f[0]|e@1", "--y", "fin:|r(e[0])", "--n-max", "8")
        for n, rank, value in list(csv.reader(io.StringIO(p.stdout)))[1:]:
            if int(rank) > 0:
                self.assertEqual(float(value), 2.0 ** -int(rank), n)


class DefaultBounds(unittest.TestCase):
    ARGS = ["metric", fixture("loopcycle.ug"), "--x", "ep:a[0].a[0]|g[0].h[0]", "--y", "ep:|a[0]"]

    def test_environment_sets_defaults(self):
        plain = run(*self.ARGS)
        self.assertEqual(plain.returncode, 0)
        capped = run(*self.ARGS, env_bounds="rank=5")
        self.assertEqual(capped.returncode, 2)
        self.assertEqual(fields(capped.stdout)["distance"], "unknown-beyond(5)")

    def test_flags_override_environment(self):
        p = run(*self.ARGS, "--max-rank", "100000", env_bounds="rank=5")
        self.assertEqual(p.returncode, 0)
        self.assertEqual(p.stdout, run(*self.ARGS).stdout)

    def test_bounds_are_reported(self):
        f = fields(run("analyze", fixture("twoloops.ug"), env_bounds="length=7,index=9").stdout)
        self.assertEqual(f["bounds"], "length=7 index=9 coefficients=4")

    def test_malformed_environment(self):
        for bad in ("rank", "rank=x", "speed=3", "rank=-1"):
            with self.subTest(bad=bad):
                p = run(*self.ARGS, env_bounds=bad)
                self.assertEqual(p.returncode, 1)
                self.assertIn("ULTRASHIFT_DEFAULT_BOUNDS", p.stderr)


if __name__ == "__main__":
    unittest.main(argv=sys.argv[:1], verbosity=2)
