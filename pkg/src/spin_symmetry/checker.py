import logging

from .base import Base
from .types import iter_options
from .util import NO_DEFAULT


log = logging.getLogger(__name__)


class Checker(Base):

    """Checks loaded settings against the schema they were loaded for.

    Errors are collected rather than raised so that every bad field is
    reported at once. Each error is a ``(dotted.name, message)`` pair.

    """

    def __init__(
        self,
        file_name,
        section=None,
        registry=None,
        strategy_type=None,
        unknown=(),
    ):
        super().__init__(file_name, section, registry, strategy_type)
        self.unknown = list(unknown)
        self.errors = []

    def check(self, schema, settings):
        """Validate every option in ``schema`` against ``settings``.

        Returns ``True`` or ``False`` to indicate whether the settings
        passed.

        """
        self.errors = []
        for name in self.unknown:
            self.errors.append((name, f"Unknown setting in {self.location}"))
        for name, option in sorted(iter_options(schema), key=lambda item: item[0]):
            value = settings.get_dotted(name) if settings.contains_dotted(name) else NO_DEFAULT
            if value is NO_DEFAULT:
                self.errors.append((name, "Setting has no value"))
                continue
            message = option.validate(value)
            if message:
                if name in self.registry.values():
                    message = f"{message} (set in {self.location})"
                self.errors.append((name, message))
        for name, message in self.errors:
            log.debug("%s: %s", name, message)
        return not self.errors
