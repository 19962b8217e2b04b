"""Strategies for reading run configs from & writing them to files.

Two file formats are supported, both holding named sections of flat
``dotted.name = value`` settings:

- ``.cfg``: INI sections whose values are JSON (decoded with jsun)
- ``.json``: a JSON object mapping section names to flat objects

In both formats a section may ``extends`` another section (in the same
or another file) and ``DEFAULT`` values apply to every section.

"""
import logging
import os
from abc import ABCMeta, abstractmethod
from configparser import NoSectionError, RawConfigParser

from jsun import Decoder, DecodeError, Encoder

from .exc import ConfigFileNotFoundError, ConfigSectionNotFoundError, StrategyError
from .util import parse_file_name_and_section


__all__ = [
    "Strategy",
    "INIJSONStrategy",
    "JSONStrategy",
]


log = logging.getLogger(__name__)


class RawValue(str):

    """Marker for values that couldn't be decoded when reading."""


class Strategy(metaclass=ABCMeta):

    file_types = ()

    @abstractmethod
    def get_defaults(self, file_name):
        """Get settings from the ``DEFAULT`` section of file."""

    @abstractmethod
    def read_section(self, file_name, section):
        """Read settings from ``section`` of a config file.

        Returns:
            - Settings from the section or an empty dict if the section
              isn't present.
            - Whether the section is present.

        """

    @abstractmethod
    def write_settings(self, settings, file_name, section=None):
        """Write flat ``settings`` to ``section`` of file."""

    def get_default_section(self, file_name):
        return None

    def parse_file_name_and_section(
        self,
        file_name,
        section=None,
        extender=None,
        extender_section=None,
    ):
        """Parse file name and (maybe) section.

        Falls back to the strategy's default section for the file when
        no section is given or parsed.

        """
        file_name, section = parse_file_name_and_section(
            file_name,
            section,
            extender,
            extender_section,
        )
        if section is None:
            section = self.get_default_section(file_name)
        return file_name, section

    def read_file(self, file_name, section=None, _finalize=True):
        """Read settings from config file, following ``extends``."""
        if _finalize:
            file_name, section = self.parse_file_name_and_section(file_name, section)

        if not os.path.isfile(file_name):
            raise ConfigFileNotFoundError(f"Config file not found: {file_name}")

        settings = {}

        result = self._read_one_file(file_name, section)
        file_settings, section_present, extends, extends_section = result

        if extends and extends != file_name:
            log.debug("%s#%s extends %s#%s", file_name, section, extends, extends_section)
            extends_settings, extends_section_present = self.read_file(
                extends, extends_section, _finalize=False
            )
            section_present = section_present or extends_section_present
            settings.update(extends_settings)

        settings.update(file_settings)

        if _finalize:
            if not section_present:
                raise ConfigSectionNotFoundError(
                    f"Section `{section}` not found in config file: {file_name}"
                )
            return settings

        return settings, section_present

    def _read_one_file(self, file_name, section, settings=None):
        if settings is None:
            settings = self.get_defaults(file_name)

        items, section_present = self.read_section(file_name, section)
        default_extends = settings.get("extends", None)
        extends = items.pop("extends", default_extends)

        if extends:
            extends, extends_section = self.parse_file_name_and_section(
                extends,
                extender=file_name,
                extender_section=section,
            )
            if extends == file_name:
                if extends_section == section:
                    raise StrategyError(f"Section `{section}` of {file_name} extends itself")
                extends_items, extends_section_present, *rest = self._read_one_file(
                    file_name, extends_section, settings
                )
                settings.update(extends_items)
                section_present = section_present or extends_section_present
        else:
            extends_section = None

        settings.update(items)
        settings.pop("extends", None)
        return settings, section_present, extends, extends_section

    def decode_items(self, items):
        """Bulk decode items read from file to Python objects.

        Values that can't be decoded are wrapped with :class:`RawValue`
        so they can be decoded again after interpolation.

        """
        decoded_items = {}
        for k, v in items:
            try:
                v = self.decode_value(v)
            except ValueError:
                v = RawValue(v)
            decoded_items[k] = v
        return decoded_items

    def decode_value(self, value):
        return value

    def encode_value(self, value):
        return value


class ConfigParser(RawConfigParser):
    def options(self, section):
        # Order [DEFAULT] options before section options.
        options = list(self._defaults.keys())
        try:
            section = self._sections[section]
        except KeyError:
            raise NoSectionError(section) from None
        options.extend(k for k in section.keys() if k not in self._defaults)
        return options

    def optionxform(self, option):
        # Dotted names are case sensitive.
        return option

    def get_section(self, section):
        """Get section items without defaults mixed in."""
        return self._sections[section]


class INIStrategy(Strategy):

    """Base for strategies reading INI files; values are left as is."""

    def __init__(self):
        self._parser_cache = {}

    def get_defaults(self, file_name):
        parser = self.get_parser(file_name)
        return self.decode_items(parser.defaults().items())

    def read_section(self, file_name, section):
        parser = self.get_parser(file_name)
        if parser.has_section(section):
            items, section_present = parser.get_section(section), True
        else:
            items, section_present = {}, section == "DEFAULT"
        return self.decode_items(items.items()), section_present

    def write_settings(self, settings, file_name, section=None):
        file_name, section = self.parse_file_name_and_section(file_name, section)
        parser = self.make_parser()
        if os.path.exists(file_name):
            with open(file_name) as fp:
                parser.read_file(fp)
        else:
            log.info("Creating new config file: %s", file_name)
        if section != "DEFAULT" and section not in parser:
            log.info("Adding new section to %s: %s", file_name, section)
            parser.add_section(section)
        for name in sorted(settings):
            parser[section][name] = self.encode_value(settings[name])
        with open(file_name, "w") as fp:
            parser.write(fp)
        self._parser_cache.pop(file_name, None)
        log.info("Saved %d settings to %s#%s", len(settings), file_name, section)

    def get_default_section(self, file_name):
        """Returns first non-DEFAULT section; falls back to DEFAULT."""
        if not os.path.isfile(file_name):
            return "DEFAULT"
        sections = self.get_parser(file_name).sections()
        return sections[0] if sections else "DEFAULT"

    def get_parser(self, file_name):
        if file_name not in self._parser_cache:
            parser = self.make_parser()
            with open(file_name) as fp:
                parser.read_file(fp)
            self._parser_cache[file_name] = parser
        return self._parser_cache[file_name]

    def make_parser(self):
        return ConfigParser()


class INIJSONStrategy(INIStrategy):

    file_types = ("cfg",)

    def __init__(self):
        super().__init__()
        self._decode = Decoder(strict=True, object_converter=None).decode
        self._encode = Encoder().encode

    def decode_value(self, value):
        try:
            value = self._decode(value)
        except DecodeError as exc:
            raise ValueError(
                f"Could not parse `{value}` as JSON, number, or "
                f"datetime (issue at line {exc.line} column "
                f"{exc.column} position {exc.position})",
            )
        return value

    def encode_value(self, value):
        return self._encode(value)


class JSONStrategy(Strategy):

    """Reads a JSON object of sections, each a flat object of settings."""

    file_types = ("json",)

    def __init__(self):
        self._decode = Decoder(strict=True, object_converter=None).decode
        self._encode = Encoder().encode
        self._cache = {}

    def get_defaults(self, file_name):
        return self._mark_templates(self._load(file_name).get("DEFAULT", {}))

    def read_section(self, file_name, section):
        sections = self._load(file_name)
        if section in sections:
            return self._mark_templates(sections[section]), True
        return {}, section == "DEFAULT"

    def decode_value(self, value):
        try:
            return self._decode(value)
        except DecodeError as exc:
            raise ValueError(f"Could not parse `{value}` as JSON (position {exc.position})")

    def encode_value(self, value):
        return self._encode(value)

    def _mark_templates(self, items):
        # Templated strings are decoded again once interpolated.
        return {
            name: RawValue(value) if isinstance(value, str) and "{{" in value else value
            for name, value in items.items()
        }

    def write_settings(self, settings, file_name, section=None):
        file_name, section = self.parse_file_name_and_section(file_name, section)
        sections = dict(self._load(file_name)) if os.path.exists(file_name) else {}
        existing = dict(sections.get(section, {}))
        existing.update(settings)
        sections[section] = existing
        with open(file_name, "w") as fp:
            fp.write(Encoder(indent=2, sort_keys=True).encode(sections))
            fp.write("\n")
        self._cache.pop(file_name, None)
        log.info("Saved %d settings to %s#%s", len(settings), file_name, section)

    def get_default_section(self, file_name):
        if not os.path.isfile(file_name):
            return "DEFAULT"
        names = [name for name in self._load(file_name) if name != "DEFAULT"]
        return names[0] if names else "DEFAULT"

    def _load(self, file_name):
        if file_name not in self._cache:
            with open(file_name) as fp:
                text = fp.read()
            try:
                data = self._decode(text)
            except DecodeError as exc:
                raise StrategyError(
                    f"Could not parse {file_name} as JSON (issue at line {exc.line} "
                    f"column {exc.column})"
                )
            if not isinstance(data, dict) or not all(
                isinstance(items, dict) for items in data.values()
            ):
                raise StrategyError(
                    f"{file_name} must hold a JSON object mapping section names to objects"
                )
            self._cache[file_name] = data
        return self._cache[file_name]


def get_strategy_types():
    """Get all concrete :class:`Strategy` subclasses ordered by file type."""

    def get_subtypes(type_):
        subtypes = list(type_.__subclasses__())
        for subtype in list(subtypes):
            subtypes.extend(get_subtypes(subtype))
        return subtypes

    sub_types = [t for t in get_subtypes(Strategy) if t.file_types]
    return sorted(set(sub_types), key=lambda t: t.file_types[0])


def get_file_type_map():
    """Map file types (extensions) to strategy types."""
    file_type_map = {}
    for strategy_type in get_strategy_types():
        for ext in strategy_type.file_types:
            if ext in file_type_map:
                raise KeyError(f"File type {ext} already registered to {file_type_map[ext]}")
            file_type_map[ext] = strategy_type
    return file_type_map


def guess_strategy_type(file_name_or_ext):
    """Guess strategy type to use for file by extension.

    Returns:
        Strategy: Type corresponding to extension or None if there's no
            corresponding strategy type

    """
    if "." not in file_name_or_ext:
        ext = file_name_or_ext
    else:
        ext = os.path.splitext(file_name_or_ext)[1]
    ext = ext.lstrip(".")
    return get_file_type_map().get(ext, None)
