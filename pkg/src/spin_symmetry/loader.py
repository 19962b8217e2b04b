import copy
import logging
from collections.abc import MutableMapping, MutableSequence

from jsun import Encoder

from .base import Base
from .checker import Checker
from .exc import ConfigError
from .settings import Settings
from .strategy import RawValue
from .types import iter_options


log = logging.getLogger(__name__)

MAX_INTERPOLATION_PASSES = 10


class Loader(Base):

    """Loads run settings from a config file on top of a schema.

    Settings are built from, in increasing order of precedence:

        - schema defaults (including defaults derived from other options)
        - ``[DEFAULT]`` values and values from extended sections
        - values from the selected section
        - ``overrides`` (e.g., from command line flags)

    ``{{ dotted.name }}`` groups in values (and in names) are then
    replaced with the value of the named setting.

    """

    def __init__(self, file_name, section=None, registry=None, strategy_type=None):
        super().__init__(file_name, section, registry, strategy_type)
        self.unknown = []
        self._encode = Encoder().encode

    def load_and_check(self, schema, overrides=None):
        """Load settings for a private copy of ``schema`` and check them.

        Returns:
            (settings, []) on success
            (None, errors) on failure, where errors is a list of
                ``(dotted.name, message)`` pairs

        """
        schema = copy.deepcopy(schema)
        settings = self.load(schema, overrides)
        checker = Checker(
            self.file_name,
            self.section,
            self.registry,
            self.strategy_type,
            unknown=self.unknown,
        )
        if checker.check(schema, settings):
            return settings, []
        return None, checker.errors

    def load(self, schema, overrides=None):
        options = dict(iter_options(schema))
        names = {option: name for name, option in options.items()}

        if self.file_name is not None:
            items = self.strategy.read_file(self.file_name, self.section)
            log.debug("Read %d settings from %s", len(items), self.location)
        else:
            items = {}
        items = list(items.items()) + list((overrides or {}).items())

        settings = Settings()
        for name, option in options.items():
            settings.set_dotted(name, copy.deepcopy(option.value))

        plain = [(n, v) for (n, v) in items if "{{" not in n]
        templated = [(n, v) for (n, v) in items if "{{" in n]
        for name, value in plain:
            self._apply(options, settings, name, value)
        for name, value in templated:
            name, _ = self._inject(name, settings)
            self._apply(options, settings, name, value)

        self._interpolate_values(settings)

        for option, name in self.registry.items():
            option.value = settings.get_dotted(name)

        # Derived defaults follow whatever their source ended up as.
        for name, option in options.items():
            if option not in self.registry and option.derived_default:
                source = names[option.derived_default]
                settings.set_dotted(name, copy.deepcopy(settings.get_dotted(source)))

        return settings

    def _apply(self, options, settings, name, value):
        option = options.get(name)
        if option is None:
            log.debug("Unknown setting in %s: %s", self.location, name)
            self.unknown.append(name)
            return
        option.value = value
        self.registry[option] = name
        settings.set_dotted(name, value)

    # Post-processing

    def _interpolate_values(self, settings):
        for _ in range(MAX_INTERPOLATION_PASSES):
            interpolated = []

            def inject(value):
                new_value, changed = self._inject(value, settings)
                if changed:
                    if isinstance(value, RawValue):
                        new_value = RawValue(new_value)
                    interpolated.append((value, new_value))
                return new_value

            self._traverse_object(settings, inject)
            if not interpolated:
                break
        else:
            raise ConfigError(
                f"Interpolation in {self.location} didn't settle after "
                f"{MAX_INTERPOLATION_PASSES} passes (circular reference?)"
            )

        def decode(value):
            if isinstance(value, RawValue):
                try:
                    return self.strategy.decode_value(str(value))
                except ValueError:
                    return str(value)
            return value

        self._traverse_object(settings, decode)

    def _traverse_object(self, obj, action):
        if isinstance(obj, MutableMapping):
            for k, v in obj.items():
                obj[k] = self._traverse_object(v, action)
        elif isinstance(obj, MutableSequence):
            for i, v in enumerate(obj):
                obj[i] = self._traverse_object(v, action)
        elif isinstance(obj, str):
            obj = action(obj)
        return obj

    def _inject(self, value, settings):
        """Inject ``settings`` into ``value``.

        Go through ``value`` looking for ``{{ name }}`` groups and
        replace each group with the value of the named setting (JSON
        encoded when it isn't a string).

        Returns:
            (str, bool): The new value and whether it differs from the
                original value

        """
        if "{{" not in value:
            return value, False

        new_value = value
        start = new_value.find("{{")
        while start != -1:
            end = new_value.find("}}", start)
            if end == -1:
                raise ConfigError(f"Unclosed {{{{ ... }}}} in `{value}`")
            name = new_value[start + 2 : end].strip()
            if not name:
                raise ConfigError(f"Found empty interpolation group in `{value}`")
            try:
                v = settings.get_dotted(name)
            except KeyError:
                raise ConfigError(
                    f"`{name}` referenced in `{value}` is not a setting", fields=[name]
                ) from None
            if not isinstance(v, str):
                v = self._encode(v.to_plain() if isinstance(v, Settings) else v)
            new_value = "".join((new_value[:start], v, new_value[end + 2 :]))
            start = new_value.find("{{", start + len(v))

        return new_value, new_value != value
