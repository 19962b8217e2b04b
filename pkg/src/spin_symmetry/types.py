from collections.abc import Mapping

from jsun import dumps

from .exc import NoDefaultError, NoValueError
from .util import NO_DEFAULT


class Option:

    """A documented, validated entry in the run configuration schema.

    Every option has a default. A default can also be *derived* from
    another option by passing that option as the default; its value
    is then used unless this option is set explicitly::

        >>> potential = Option({'kind': 'constant', 'value': 0.0})
        >>> shape = Option(potential)
        >>> potential.value = {'kind': 'constant', 'value': 1.0}
        >>> shape.value
        {'kind': 'constant', 'value': 1.0}

    ``validator`` is a callable returning an error message (a str) for
    a bad value and ``None`` for a good one.

    """

    def __init__(self, default=NO_DEFAULT, doc=None, validator=None):
        self.derived_default = NO_DEFAULT
        if isinstance(default, Option):
            self.derived_default = default
        elif default is not NO_DEFAULT:
            try:
                dumps(default)
            except TypeError as exc:
                raise TypeError(f"{exc}\nDefault value for Option must be JSON serializable")
        self.default = default
        self.doc = doc
        self.validator = validator
        self._value = NO_DEFAULT

    @property
    def has_default(self):
        return self._get_default() is not NO_DEFAULT

    @property
    def has_value(self):
        return self._value is not NO_DEFAULT

    def _get_default(self):
        if self.derived_default:
            return self.derived_default.value
        return self._default

    @property
    def default(self):
        default = self._get_default()
        if default is NO_DEFAULT:
            raise NoDefaultError("Option has no default value")
        return default

    @default.setter
    def default(self, default):
        self._default = NO_DEFAULT if isinstance(default, Option) else default

    @property
    def value(self):
        value = self._value
        if value is NO_DEFAULT:
            value = self._get_default()
        if value is NO_DEFAULT:
            raise NoValueError("Option has no value")
        return value

    @value.setter
    def value(self, value):
        self._value = value

    def validate(self, value):
        """Return an error message for ``value`` or ``None``."""
        if self.validator:
            return self.validator(value)
        return None

    def __str__(self):
        class_name = self.__class__.__name__
        try:
            default = repr(self.default)
        except NoDefaultError:
            default = "[NO DEFAULT VALUE]"
        try:
            value = repr(self.value)
        except NoValueError:
            value = "[NO VALUE SET]"
        return f"<{class_name} with default `{default}` and value `{value}`>"


def iter_options(schema, prefix=None):
    """Yield ``(dotted.name, option)`` for every option in ``schema``."""
    for name, value in schema.items():
        dotted = name if prefix is None else f"{prefix}.{name}"
        if isinstance(value, Option):
            yield dotted, value
        elif isinstance(value, Mapping):
            yield from iter_options(value, dotted)
