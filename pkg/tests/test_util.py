import io
import os
import tempfile
import unittest

from spin_symmetry.util import (
    FILE_ENV_VAR,
    NO_DEFAULT,
    abs_path,
    asset_path,
    get_file_name,
    is_a_tty,
    load_dotenv,
    parse_file_name_and_section,
)


class TestUtil(unittest.TestCase):
    def setUp(self):
        self.cwd = os.getcwd()
        self.file_name = os.environ.pop(FILE_ENV_VAR, None)

    def tearDown(self):
        os.chdir(self.cwd)
        os.environ.pop(FILE_ENV_VAR, None)
        if self.file_name is not None:
            os.environ[FILE_ENV_VAR] = self.file_name

    def test_NO_DEFAULT_is_False(self):
        self.assertFalse(NO_DEFAULT)
        self.assertEqual(repr(NO_DEFAULT), "NO_DEFAULT")

    def test_default_file_name(self):
        os.chdir(os.path.dirname(os.path.abspath(__file__)))
        file_name = get_file_name()
        self.assertEqual(os.path.basename(file_name), "spin-symmetry.cfg")

    def test_no_default_file(self):
        with tempfile.TemporaryDirectory() as directory:
            os.chdir(directory)
            self.assertIsNone(get_file_name())

    def test_set_file_name_via_environ(self):
        os.environ[FILE_ENV_VAR] = "pants.cfg"
        file_name = get_file_name()
        self.assertEqual(file_name, "pants.cfg")


class TestPaths(unittest.TestCase):
    def test_asset_path(self):
        path = asset_path("spin_symmetry:presets.cfg")
        self.assertTrue(os.path.isfile(path))

    def test_asset_path_bad_package(self):
        self.assertRaises(ValueError, asset_path, "no_such_package_here:presets.cfg")

    def test_abs_path_relative_to(self):
        self.assertEqual(abs_path("runs.cfg", relative_to="/tmp/x"), "/tmp/x/runs.cfg")
        self.assertEqual(abs_path("/tmp/x/../runs.cfg"), "/tmp/runs.cfg")

    def test_parse_section(self):
        self.assertEqual(
            parse_file_name_and_section("/tmp/runs.cfg#pseudospin"),
            ("/tmp/runs.cfg", "pseudospin"),
        )
        self.assertEqual(
            parse_file_name_and_section("/tmp/runs.cfg#pseudospin", "spin"),
            ("/tmp/runs.cfg", "spin"),
        )
        self.assertEqual(parse_file_name_and_section("/tmp/runs.cfg"), ("/tmp/runs.cfg", None))

    def test_parse_extends(self):
        self.assertEqual(
            parse_file_name_and_section("#base", extender="/tmp/runs.cfg", extender_section="x"),
            ("/tmp/runs.cfg", "base"),
        )
        file_name, section = parse_file_name_and_section(
            "base.cfg", extender="/tmp/runs.cfg", extender_section="x"
        )
        self.assertEqual((file_name, section), ("/tmp/base.cfg", "x"))

    def test_load_dotenv(self):
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, ".env")
            with open(path, "w") as fp:
                fp.write("SPIN_SYMMETRY_TEST_DOTENV=1\n")
            try:
                self.assertEqual(load_dotenv(path), path)
                self.assertEqual(os.environ["SPIN_SYMMETRY_TEST_DOTENV"], "1")
            finally:
                os.environ.pop("SPIN_SYMMETRY_TEST_DOTENV", None)

    def test_is_a_tty(self):
        self.assertFalse(is_a_tty(io.StringIO()))
        self.assertFalse(is_a_tty(object()))
