import doctest
import io
import unittest

import spin_symmetry.color_printer
from spin_symmetry.color_printer import ColorPrinter


def load_tests(loader, tests, ignore):
    tests.addTests(doctest.DocTestSuite(spin_symmetry.color_printer))
    return tests


class TTY(io.StringIO):
    def isatty(self):
        return True


class TestColorPrinter(unittest.TestCase):
    def test_plain_when_not_a_tty(self):
        stream = io.StringIO()
        ColorPrinter().print_error("bad config", file=stream)
        self.assertEqual(stream.getvalue(), "bad config\n")

    def test_color_on_a_tty(self):
        stream = TTY()
        ColorPrinter().print_error("bad config", file=stream)
        self.assertEqual(stream.getvalue(), "\033[91mbad config\033[0m\n")

    def test_quiet_keeps_errors(self):
        stream = io.StringIO()
        printer = ColorPrinter(quiet=True)
        printer.print_info("wrote results", file=stream)
        printer.print_result(True, "spectrum: pass", file=stream)
        printer.print_result(False, "spectrum: FAIL", file=stream)
        printer.print_warning("watch out", file=stream)
        self.assertEqual(stream.getvalue(), "spectrum: FAIL\nwatch out\n")

    def test_custom_colors(self):
        printer = ColorPrinter(colors={"info": "<info>"})
        self.assertEqual(printer.string_info("x"), "<info>x\033[0m")
        self.assertEqual(ColorPrinter().string_info("x"), "\033[94mx\033[0m")
