import json
import logging
import sys
from collections import Counter
from typing import Dict, Tuple

from models.errors import DomainError
from models.set_function import GroundSet, SetFunction, format_rational, parse_rational

logger = logging.getLogger(__name__)

LAYOUTS = ('dense', 'sparse')


class FunctionStore:
    """Reads and writes set functions in the JSON file format.

    Dense: {"ground_set": [...], "values": [v_0, ..., v_{2^n-1}]}.
    Sparse: {"ground_set": [...], "default": v, "entries": {"a,c": v, ...}}.
    Values are strings holding exact decimals or p/q fractions.
    """

    def __init__(self, indent: int = 2):
        self.indent = indent

    def encode(self, f: SetFunction, layout: str = 'dense') -> str:
        if layout not in LAYOUTS:
            raise DomainError(f"unknown layout {layout!r}; expected one of {', '.join(LAYOUTS)}")
        document: Dict = {'ground_set': list(f.ground.elements)}
        if f.provenance:
            document['provenance'] = f.provenance
        if layout == 'dense':
            document['values'] = [format_rational(v) for v in f.values]
        else:
            default = self._most_common(f)
            document['default'] = format_rational(default)
            document['entries'] = {
                sparse_key(f.ground, mask): format_rational(value)
                for mask, value in enumerate(f.values) if value != default
            }
        return json.dumps(document, indent=self.indent) + '\n'

    @staticmethod
    def _most_common(f: SetFunction):
        counts = Counter(f.values)
        best = max(counts.values())
        # first value (by mask) among the most frequent ones
        return next(v for v in f.values if counts[v] == best)

    def decode(self, text: str) -> Tuple[SetFunction, str]:
        """Parse a document; returns the function and the layout it used"""
        try:
            document = json.loads(text)
        except json.JSONDecodeError as e:
            raise DomainError(f"malformed JSON: {e}")
        if not isinstance(document, dict) or 'ground_set' not in document:
            raise DomainError("set-function document must be an object with a 'ground_set' list")
        names = document['ground_set']
        if not isinstance(names, list):
            raise DomainError("'ground_set' must be a list of element names")
        ground = GroundSet(tuple(names))
        provenance = document.get('provenance', '')

        if 'values' in document:
            values = document['values']
            if not isinstance(values, list):
                raise DomainError("'values' must be a list")
            return SetFunction(ground, [parse_rational(v) for v in values], provenance), 'dense'

        if 'default' in document:
            default = parse_rational(document['default'])
            values = [default] * ground.size
            entries = document.get('entries', {})
            if not isinstance(entries, dict):
                raise DomainError("'entries' must be an object keyed by comma-joined element names")
            seen = set()
            for key, value in entries.items():
                mask = ground.parse_subset(key)
                if mask in seen:
                    raise DomainError(f"subset {key!r} appears twice in 'entries'")
                seen.add(mask)
                values[mask] = parse_rational(value)
            return SetFunction(ground, values, provenance), 'sparse'

        raise DomainError("set-function document needs either 'values' or 'default'/'entries'")

    def read(self, path: str) -> Tuple[SetFunction, str]:
        if path == '-':
            text = sys.stdin.read()
        else:
            with open(path, encoding='utf-8') as handle:
                text = handle.read()
        f, layout = self.decode(text)
        logger.info(f"Loaded {f!r} from {path} ({layout})")
        return f, layout

    def write(self, f: SetFunction, path: str, layout: str = 'dense') -> None:
        text = self.encode(f, layout)
        with open(path, 'w', encoding='utf-8') as handle:
            handle.write(text)
        logger.info(f"Wrote {f!r} to {path} ({layout})")


def sparse_key(ground: GroundSet, mask: int) -> str:
    """Comma-joined sorted element names"""
    return ','.join(sorted(ground.names_of(mask)))


def dump_report(report: Dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True)
