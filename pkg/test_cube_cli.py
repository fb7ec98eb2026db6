"""
Test suite for the command line.

Runs main() with argument lists and checks exit codes and printed reports.
"""

import io
import json
import os
import tempfile
import unittest
from contextlib import redirect_stdout

from cube_cli import isolated_types, main, parse_range, parse_section
from construction import GENERIC
from model_config import get_search_config, set_search_config
from orbifold_analysis import OrbifoldPoint


def run(*argv):
    out = io.StringIO()
    with redirect_stdout(out):
        code = main(list(argv))
    return code, out.getvalue()


class TestHelpers(unittest.TestCase):

    def test_parse_range(self):
        self.assertEqual(parse_range("3..7"), (3, 7))
        self.assertEqual(parse_range("4"), (4, 4))

    def test_parse_section(self):
        self.assertEqual(parse_section("4@X222").target, "X222")
        self.assertEqual(parse_section("5").target, GENERIC)

    def test_isolated_types(self):
        types = isolated_types(5)
        self.assertIn(OrbifoldPoint(2, 1, 1), types)
        self.assertIn(OrbifoldPoint(5, 1, 2), types)
        self.assertNotIn(OrbifoldPoint(5, 1, 3), types)
        self.assertEqual(len(types), len(set(types)))


class TestHilbert(unittest.TestCase):

    def test_straight(self):
        code, out = run("hilbert", "--mu", "0,0,0,0,1,1", "--order", "3")
        self.assertEqual(code, 0)
        self.assertIn("1 - 9t^2 + 16t^3 - 9t^4 + t^6", out)
        self.assertIn("1, 8, 27, 64", out)
        self.assertIn("D^3 = 6", out)

    def test_socle_degree(self):
        code, out = run("hilbert", "--mu", "0,1,0,1,1,2")
        self.assertEqual(code, 0)
        self.assertIn("l = 5", out)

    def test_nonpositive(self):
        code, out = run("hilbert", "--mu", "0,0,0,0,0,0")
        self.assertNotEqual(code, 0)
        self.assertIn("[ERROR]", out)
        self.assertIn("nonpositive vertex weight", out)


class TestAnalyze(unittest.TestCase):

    def test_index_model_degree(self):
        code, out = run("construct", "--model", "mi4.json", "--n", "0")
        self.assertEqual(code, 0)
        self.assertIn("-K^2 = 4352/975", out)
        self.assertIn("wellformed: no", out)

    def test_quartic_basket(self):
        code, out = run("analyze", "--mu", "0,1,0,1,1,2", "--section", "4@X222")
        self.assertEqual(code, 0)
        self.assertIn("3 x 1/3(1,1)", out)
        self.assertIn("h0(-K) = 1", out)

    def test_sporadic_obstructed(self):
        code, out = run("analyze", "--model", "m12.json")
        self.assertEqual(code, 0)
        self.assertIn("h0(-K) = 0", out)
        self.assertIn("toric degeneration obstructed", out)

    def test_dimension_error(self):
        code, out = run("analyze", "--mu", "0,1,0,1,1,2")
        self.assertEqual(code, 1)
        self.assertIn("dimension 3", out)


class TestModelCommands(unittest.TestCase):

    def test_verify_passes(self):
        code, out = run("verify-model", "mi4.json", "--n", "1..2")
        self.assertEqual(code, 0, out)
        self.assertIn("[OK] MI4", out)

    def test_verify_lines(self):
        code, out = run("verify-model", "mi4.json", "--n", "1..1", "--lines")
        self.assertEqual(code, 0, out)
        self.assertIn("n=1 r=11", out)
        self.assertIn("plurigenus=ok", out)

    def test_verify_failure_exit_code(self):
        with tempfile.TemporaryDirectory() as tmp:
            with open(os.path.join(os.path.dirname(__file__), "models", "mi4.json")) as f:
                data = json.load(f)
            data['expected']['h0'] = 5
            path = os.path.join(tmp, "broken.json")
            with open(path, 'w') as f:
                json.dump(data, f)
            code, out = run("verify-model", path, "--n", "1..1")
        self.assertEqual(code, 1)
        self.assertIn("[ERROR] MI4", out)

    def test_show_and_validate(self):
        code, out = run("show-model", "mi1.json")
        self.assertEqual(code, 0)
        self.assertIn("r = 4*n + 1", out)
        code, out = run("validate-model", "mi1.json")
        self.assertEqual(code, 0)
        self.assertIn("[OK] Model is valid", out)

    def test_validate_reports_fields(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "bad.json")
            with open(path, 'w') as f:
                json.dump({"name": "bad", "law": {"step": 1, "offset": 1},
                           "mu": ["0", "k", "0", "1", "1", "r"]}, f)
            code, out = run("validate-model", path)
        self.assertEqual(code, 1)
        self.assertIn("mu: unknown symbols k", out)


class TestCalibrateAndSearch(unittest.TestCase):

    def setUp(self):
        self.addCleanup(set_search_config, get_search_config())

    def test_calibrate_writes_cache(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "calibration.jsonl")
            code, out = run("calibrate", "--max-order", "5", "--cache", path)
            self.assertEqual(code, 0)
            self.assertIn("1/2(1,1): -1/4t / (1 - t^2)", out)
            with open(path) as f:
                self.assertEqual(json.loads(f.readline())['format'], "p1cube-calibration")

    def test_small_search_into_database(self):
        with tempfile.TemporaryDirectory() as tmp:
            db = os.path.join(tmp, "candidates.jsonl")
            code, out = run("search", "--index", "2..2", "--adjunction", "19", "--max-cones", "0",
                            "--db", db)
            self.assertEqual(code, 0, out)
            self.assertIn("candidates", out)
            self.assertTrue(os.path.exists(db))
            self.assertEqual(get_search_config().index_max, 2)
            self.assertEqual(get_search_config().max_cones, 0)

    def test_search_is_reproducible(self):
        with tempfile.TemporaryDirectory() as tmp:
            contents = []
            for workers in ("1", "2"):
                db = os.path.join(tmp, f"candidates-{workers}.jsonl")
                code, out = run("search", "--index", "2..2", "--adjunction", "19", "--max-cones", "0",
                                "--workers", workers, "--db", db)
                self.assertEqual(code, 0, out)
                with open(db, "rb") as f:
                    contents.append(f.read())
            self.assertEqual(contents[0], contents[1])

    def test_invalid_window(self):
        code, out = run("search", "--index", "5..2")
        self.assertEqual(code, 2)
        self.assertIn("index_max", out)


if __name__ == '__main__':
    unittest.main()
