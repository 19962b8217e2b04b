import importlib
import os

import dotenv


NO_DEFAULT = type(
    "NO_DEFAULT",
    (),
    {
        "__bool__": (lambda self: False),
        "__repr__": (lambda self: "NO_DEFAULT"),
        "__copy__": (lambda self: self),
        "__deepcopy__": (lambda self, memo: self),
    },
)()


FILE_ENV_VAR = "SPIN_SYMMETRY_FILE"
DEFAULT_FILE_STEM = "spin-symmetry"


def get_file_name():
    """Run config named by ``SPIN_SYMMETRY_FILE`` or found in the CWD.

    Candidates are ``spin-symmetry.<ext>`` for every extension a
    :mod:`strategy` reads, tried alphabetically (``.cfg`` before
    ``.json``). ``None`` means the built-in defaults apply.

    """
    from .strategy import get_file_type_map  # noqa: strategy imports util

    if os.environ.get(FILE_ENV_VAR):
        return os.environ[FILE_ENV_VAR]
    for ext in sorted(get_file_type_map()):
        candidate = os.path.join(os.getcwd(), f"{DEFAULT_FILE_STEM}.{ext}")
        if os.path.exists(candidate):
            return candidate
    return None


def parse_file_name_and_section(
    file_name, section=None, extender=None, extender_section=None
):
    """Split ``file_name#section`` and resolve the file name.

    The file name may be a path or a ``package:relative/path`` asset
    spec such as ``spin_symmetry:presets.cfg#pseudospin``. An explicit
    ``section`` wins over a parsed one. With ``extender`` (the file
    doing the extending) a relative name is resolved next to it and an
    empty one means the same file; ``extender_section`` is the fallback
    section.

    """
    file_name, _, parsed_section = file_name.partition("#")
    if ":" in file_name and not os.path.isabs(file_name):
        file_name = asset_path(file_name)
    if extender:
        if not file_name:
            file_name = extender
        elif not os.path.isabs(file_name):
            file_name = abs_path(file_name, relative_to=os.path.dirname(extender))
    return file_name, section or parsed_section or extender_section or None


def abs_path(path, relative_to=None):
    """Normalized absolute path; asset specs are resolved too."""
    if ":" in path and not os.path.isabs(path):
        return asset_path(path)
    path = os.path.expanduser(path)
    if relative_to:
        path = os.path.join(relative_to, path)
    return os.path.normpath(os.path.abspath(path))


def asset_path(path):
    """Path of ``package:relative/path`` inside the installed package."""
    package_name, _, rel_path = path.partition(":")
    try:
        package = importlib.import_module(package_name)
    except ImportError:
        raise ValueError(f"Could not import package {package_name} for asset {path}")
    if not getattr(package, "__file__", None):
        raise ValueError(f"{package_name} is a namespace package; it has no asset directory")
    return os.path.normpath(os.path.join(os.path.dirname(package.__file__), rel_path))


def load_dotenv(path=None, relative_to=None, file_name=".env"):
    """Load a dotenv file into environ; returns its path, if any.

    Without ``path`` the file is searched for from the CWD up.

    """
    if path:
        path = abs_path(path, relative_to)
    else:
        path = dotenv.find_dotenv(filename=file_name, usecwd=True)
    if path:
        dotenv.load_dotenv(path)
    return path


def is_a_tty(stream):
    """Whether ``stream`` is an interactive terminal (colors are off otherwise)."""
    isatty = getattr(stream, "isatty", None)
    return bool(callable(isatty) and isatty())
