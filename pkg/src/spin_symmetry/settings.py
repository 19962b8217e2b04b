import re
from collections.abc import Mapping, Sequence

from .util import NO_DEFAULT


_SEGMENT_RE = re.compile(
    r"""
    \(  (?P<group>[^()]*)  \)   # (grouped.name) is never split or converted
    | (?P<interp>\{\{.*?\}\})   # {{ dotted.name }} interpolation group
    | (?P<plain>[^.(){}]+)
    """,
    re.VERBOSE,
)


class DottedAccessMixin:

    """Provides dotted access to nested items in dict-like containers.

    >>> settings = Settings({'radial': {'grid': {'r_max': 20.0}}})
    >>> settings.contains_dotted('radial.grid.r_max')
    True
    >>> settings.get_dotted('radial.grid.r_max')
    20.0
    >>> settings.get_dotted('radial.grid.points', default=None)

    Missing containers are created on the way down:

    >>> settings.set_dotted('planar.m_j.1', 0.5)
    >>> settings.planar.m_j
    [NO_DEFAULT, 0.5]

    """

    def contains_dotted(self, name):
        try:
            self._traverse(name)
        except (KeyError, IndexError, TypeError):
            return False
        return True

    def get_dotted(self, name, default=NO_DEFAULT):
        try:
            return self._traverse(name)
        except (KeyError, IndexError, TypeError):
            if default is NO_DEFAULT:
                raise KeyError(name) from None
            return default

    def set_dotted(self, name, value, create_missing=True):
        segments = self._parse_path(name)
        obj = self
        for segment, next_segment in zip(segments, segments[1:]):
            if create_missing:
                self._create_segment(obj, segment, next_segment)
            obj = obj[segment]
        obj[segments[-1]] = value

    def pop_dotted(self, name, default=NO_DEFAULT):
        segments = self._parse_path(name)
        try:
            parent = self._traverse(segments[:-1]) if len(segments) > 1 else self
            return parent.pop(segments[-1])
        except (KeyError, IndexError, TypeError):
            if default is NO_DEFAULT:
                raise KeyError(name) from None
            return default

    def _traverse(self, name):
        segments = self._parse_path(name) if isinstance(name, str) else name
        obj = self
        for segment in segments:
            obj = obj[segment]
        return obj

    def _create_segment(self, obj, segment, next_segment):
        if isinstance(next_segment, int):
            value = [NO_DEFAULT] * (next_segment + 1)
        else:
            value = Settings()
        if isinstance(obj, Mapping):
            if segment not in obj:
                obj[segment] = value
        elif isinstance(obj, Sequence):
            if segment >= len(obj):
                obj.extend([NO_DEFAULT] * (segment + 1 - len(obj)))
            if obj[segment] is NO_DEFAULT:
                obj[segment] = value
        if isinstance(next_segment, int):
            child = obj[segment]
            if len(child) <= next_segment:
                child.extend([NO_DEFAULT] * (next_segment + 1 - len(child)))

    def _parse_path(self, path):
        """Parse ``path`` into segments.

        Segments are separated by dots. A segment wrapped in
        parentheses is kept as is, dots included. Interpolation groups
        are never split. Bare segments that look like ints (without a
        leading zero) index into lists::

            >>> settings = Settings()
            >>> settings._parse_path('radial.grid.r_max')
            ['radial', 'grid', 'r_max']
            >>> settings._parse_path('planar.m_j.0')
            ['planar', 'm_j', 0]
            >>> settings._parse_path('tolerances.(1e-8)')
            ['tolerances', '1e-8']
            >>> settings._parse_path('output.{{ command }}.csv')
            ['output', '{{ command }}', 'csv']
            >>> settings._parse_path('x.07')
            ['x', '07']

        """
        if not path:
            raise ValueError("path cannot be empty")
        if path.count("(") != path.count(")"):
            raise ValueError(f"Unclosed (...) in {path}")
        if path.count("{{") != path.count("}}"):
            raise ValueError(f"Unclosed {{{{ ... }}}} in {path}")

        segments = []
        for part in self._split(path):
            match = _SEGMENT_RE.fullmatch(part)
            if match is None:
                raise ValueError(f"Bad segment `{part}` in {path}")
            if match.group("group") is not None:
                segments.append(match.group("group"))
            elif match.group("interp") is not None:
                segments.append(match.group("interp"))
            else:
                segments.append(self._convert_name(match.group("plain")))
        return segments

    def _split(self, path):
        """Split on dots that aren't inside (...) or {{ ... }}."""
        parts, current, depth = [], [], 0
        i = 0
        while i < len(path):
            c = path[i]
            if path.startswith("{{", i):
                depth += 1
                current.append("{{")
                i += 2
                continue
            if path.startswith("}}", i):
                depth -= 1
                current.append("}}")
                i += 2
                continue
            if c == "(":
                depth += 1
            elif c == ")":
                depth -= 1
            if c == "." and depth == 0:
                parts.append("".join(current))
                current = []
            else:
                current.append(c)
            i += 1
        parts.append("".join(current))
        return parts

    def _convert_name(self, name):
        if re.fullmatch(r"\d+", name) and not (len(name) > 1 and name[0] == "0"):
            return int(name)
        return name


class Settings(dict, DottedAccessMixin):

    """Nested dict of run settings with attribute and dotted access.

    Nested mappings are converted to :class:`Settings` on the way in::

        >>> settings = Settings()
        >>> settings.set_dotted('radial.grid.points', 4000)
        >>> settings.radial.grid.points
        4000
        >>> settings['radial']['grid']['points']
        4000

    :meth:`flatten` goes the other way, producing dotted keys for every
    leaf; ``keep`` names dotted paths whose values should be kept whole
    even if they are mappings::

        >>> settings.set_dotted('radial.potential', {'kind': 'constant', 'value': 0})
        >>> sorted(settings.flatten(keep={'radial.potential'}).items())
        [('radial.grid.points', 4000), ('radial.potential', {'kind': 'constant', 'value': 0})]

    This is a ``dict`` subclass, so anything expecting a plain dict
    (``json.dumps``, for one) accepts it.

    """

    def __init__(self, *args, **kwargs):
        self.update(*args, **kwargs)

    def __setitem__(self, name, value):
        if isinstance(value, Mapping) and not isinstance(value, Settings):
            value = Settings(value)
        super().__setitem__(name, value)

    def __getattr__(self, name):
        try:
            return self[name]
        except KeyError:
            raise AttributeError(name) from None

    def __setattr__(self, name, value):
        self[name] = value

    def __getstate__(self):
        return self.__dict__

    def __setstate__(self, state):
        self.__dict__.update(state)

    def setdefault(self, name, default=None):
        if name not in self:
            self[name] = default
        return self[name]

    def update(self, *args, **kwargs):
        if len(args) > 1:
            raise TypeError(f"update() takes at most 1 positional argument, got {len(args)}")
        other = args[0] if args else ()
        if isinstance(other, Mapping):
            other = other.items()
        elif hasattr(other, "keys"):
            other = ((k, other[k]) for k in other.keys())
        for name, value in other:
            self[name] = value
        for name, value in kwargs.items():
            self[name] = value

    def flatten(self, prefix=None, keep=()):
        """Return a flat ``{dotted.name: value}`` dict of leaves."""
        flat = {}
        for name, value in self.items():
            dotted = name if prefix is None else f"{prefix}.{name}"
            if isinstance(value, Settings) and dotted not in keep:
                flat.update(value.flatten(dotted, keep))
            else:
                flat[dotted] = value.to_plain() if isinstance(value, Settings) else value
        return flat

    def to_plain(self):
        """Convert to nested plain dicts (for serialization)."""
        return {
            name: value.to_plain() if isinstance(value, Settings) else value
            for name, value in self.items()
        }
