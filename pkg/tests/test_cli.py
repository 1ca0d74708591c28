"""
Test suite for the command-line interface and its exit codes
"""
import unittest
import sys
import os
import json
import tempfile
from contextlib import redirect_stderr, redirect_stdout
from io import StringIO
from pathlib import Path

# Add parent directory to path to import camcurate modules
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from camcurate.main import main


def run_cli(*argv):
    """Run the CLI quietly, returning (exit code, stdout, stderr)."""
    out, err = StringIO(), StringIO()
    with redirect_stdout(out), redirect_stderr(err):
        try:
            code = main(list(argv))
        except SystemExit as exc:
            code = exc.code
    return code, out.getvalue(), err.getvalue()


class TestCli(unittest.TestCase):
    """Test cases for main()"""

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.dir = Path(self.tmp.name)

    def tearDown(self):
        self.tmp.cleanup()

    def _spec(self, data):
        path = self.dir / "corpus_spec.json"
        path.write_text(json.dumps(data))
        return str(path)

    def test_usage_error(self):
        """Test a missing required argument exits with 1"""
        code, _, err = run_cli("filter")
        self.assertEqual(code, 1)
        self.assertIn("--manifest", err)

    def test_missing_config(self):
        """Test a missing config file exits with 1 and writes nothing"""
        out_dir = self.dir / "out"
        code, _, err = run_cli("templates", "--out", str(out_dir), "--config", str(self.dir / "absent.json"))
        self.assertEqual(code, 1)
        self.assertIn("config", err.lower())
        self.assertFalse(out_dir.exists())

    def test_missing_manifest(self):
        """Test an unreadable manifest exits with 1"""
        code, _, _ = run_cli("pipeline", "-q", "-j", "1", "--manifest", str(self.dir / "none.json"),
                             "--out", str(self.dir / "out"))
        self.assertEqual(code, 1)

    def test_templates(self):
        """Test the templates command writes the library"""
        code, out, _ = run_cli("templates", "--out", str(self.dir / "templates"), "-j", "1")
        self.assertEqual(code, 0)
        self.assertIn("Dolly In", out)
        self.assertEqual(len(list((self.dir / "templates").glob("template_*.txt"))), 50)

    def test_synth_pipeline_report(self):
        """Test synth, pipeline and report end to end"""
        spec = self._spec({"per_class": 2, "classes": [6, 8], "defects": {"jump": 1, "static": 1}})
        corpus = self.dir / "corpus"
        run = self.dir / "run"

        code, _, _ = run_cli("synth", "--spec", spec, "--seed", "3", "--out", str(corpus), "-q")
        self.assertEqual(code, 0)
        self.assertTrue((corpus / "manifest.json").is_file())

        code, _, _ = run_cli("pipeline", "--manifest", str(corpus / "manifest.json"), "--out", str(run),
                             "-j", "1", "-q")
        self.assertEqual(code, 0)
        report = json.loads((run / "report.json").read_text())
        self.assertEqual(report["corpus_size"], 6)
        self.assertEqual(report["decisions"]["RejectJump"], 1)

        code, out, _ = run_cli("report", "--dir", str(run))
        self.assertEqual(code, 0)
        self.assertIn("Corpus size:", out)

    def test_stagewise_commands(self):
        """Test filter, classify and match run one after another"""
        spec = self._spec({"per_class": 2, "classes": [5]})
        corpus = self.dir / "corpus"
        run = self.dir / "run"
        self.assertEqual(run_cli("synth", "--spec", spec, "--out", str(corpus), "-q")[0], 0)
        self.assertEqual(run_cli("filter", "-m", str(corpus / "manifest.json"), "-o", str(run), "-q", "-j", "1")[0], 0)
        filtered = str(run / "filtered_manifest.json")
        self.assertEqual(run_cli("classify", "-m", filtered, "-o", str(run), "-q", "-j", "1")[0], 0)
        self.assertEqual(run_cli("match", "-m", filtered, "-o", str(run), "-q", "-j", "1")[0], 0)
        pairs = (run / "pairs.jsonl").read_text().splitlines()
        self.assertEqual(len(pairs), 1)

    def test_match_without_labels(self):
        """Test match without a labels file is a configuration error"""
        manifest = self.dir / "m.json"
        manifest.write_text(json.dumps({"entries": []}))
        code, _, _ = run_cli("match", "-m", str(manifest), "-o", str(self.dir / "run"), "-q")
        self.assertEqual(code, 1)

    def test_data_error_rate_exit_code(self):
        """Test a corpus of unreadable files exits with 2"""
        manifest = self.dir / "m.json"
        manifest.write_text(json.dumps({"entries": [{"id": "a", "path": "a.txt"}, {"id": "b", "path": "b.txt"}]}))
        (self.dir / "a.txt").write_text("garbage\n")
        code, _, err = run_cli("pipeline", "-m", str(manifest), "-o", str(self.dir / "run"), "-q", "-j", "1")
        self.assertEqual(code, 2)
        self.assertIn("filter", err)
        self.assertTrue((self.dir / "run" / "report.json").is_file())

    def test_binary_pose_files_exit_code(self):
        """Test pose files with invalid UTF-8 count as data errors, not a crash"""
        manifest = self.dir / "m.json"
        manifest.write_text(json.dumps({"entries": [{"id": "a", "path": "a.txt"}, {"id": "b", "path": "b.txt"}]}))
        for name in ("a.txt", "b.txt"):
            (self.dir / name).write_bytes(b"0 0 0 0 0 0 0 1\n\xff\xfe garbage\n")
        code, _, err = run_cli("filter", "-m", str(manifest), "-o", str(self.dir / "run"), "-q", "-j", "1")
        self.assertEqual(code, 2)
        self.assertNotIn("Traceback", err)


if __name__ == '__main__':
    unittest.main()
