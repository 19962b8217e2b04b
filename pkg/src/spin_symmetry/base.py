from .exc import StrategyError
from .strategy import INIJSONStrategy, guess_strategy_type
from .util import parse_file_name_and_section


class Base:

    """Common state for the config loader and checker.

    ``file_name`` may be ``None``, meaning "built-in defaults only".

    """

    def __init__(self, file_name, section=None, registry=None, strategy_type=None):
        original_file_name = file_name
        if file_name is not None:
            file_name, section = parse_file_name_and_section(file_name, section)
        if strategy_type is None:
            if file_name is None:
                strategy_type = INIJSONStrategy
            else:
                strategy_type = guess_strategy_type(file_name)
            if strategy_type is None:
                raise StrategyError(
                    f"No strategy type was specified and no strategy "
                    f"corresponds to the specified config file: "
                    f"{original_file_name}"
                )
        self.original_file_name = original_file_name
        self.file_name = file_name
        self.section = section
        # Options that were given a value in the config file
        self.registry = {} if registry is None else registry
        self.strategy_type = strategy_type
        self.strategy = strategy_type()
        if file_name is not None and section is None:
            self.section = self.strategy.get_default_section(file_name)

    @property
    def location(self):
        if self.file_name is None:
            return "<defaults>"
        return f"{self.file_name}#{self.section}"
