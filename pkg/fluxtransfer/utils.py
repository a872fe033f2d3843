import math
import os
from contextlib import contextmanager
from tempfile import NamedTemporaryFile
from typing import Mapping

SIGNIFICANT_DIGITS = 12


def recursive_dict_update(d, u):
    """Updates the first dict argument, using second dictionary recursively.

    Examples:
        >>> d = {'device': {'g': 1, 'omega12': 2}, 'seed': 42}
        >>> u = {'device': {'g': 5, 'omega02': 10}, 'seed': 41, 'output_path': 'x.csv'}
        >>> recursive_dict_update(d, u)
        {'device': {'g': 5, 'omega12': 2, 'omega02': 10}, 'seed': 41, 'output_path': 'x.csv'}
    """
    d = d.copy()
    for k, v in u.items():
        if isinstance(v, Mapping) and isinstance(d.get(k, {}), Mapping):
            d[k] = recursive_dict_update(d.get(k, {}), v)
        else:
            d[k] = u[k]
    return d


@contextmanager
def file_handle_for_atomic_write(file_path):
    """Open temporary file object that atomically moves to destination upon exiting.

    The file will not be moved to destination in case of an exception.

    Args:
        file_path: path to file to be opened
    """
    target_folder = os.path.dirname(os.path.abspath(file_path))
    with NamedTemporaryFile(delete=False, dir=target_folder, mode='w', newline='') as f:
        try:
            yield f
        finally:
            f.flush()
            os.fsync(f.fileno())
    os.replace(f.name, file_path)


def round_significant(value, digits=SIGNIFICANT_DIGITS):
    """Rounds a float to a fixed number of significant digits, leaving inf/nan untouched.

    >>> round_significant(0.99501765432109876)
    0.995017654321
    >>> round_significant(float('inf'))
    inf
    """
    value = float(value)
    if value == 0.0:
        return 0.0
    if not math.isfinite(value):
        return value
    return float('{:.{}g}'.format(value, digits))


def rounded_tree(obj, digits=SIGNIFICANT_DIGITS):
    """Applies `round_significant` to every float inside nested dicts, lists and tuples.

    Non-finite floats become strings like 'inf' so the tree stays valid JSON.

    >>> rounded_tree({'a': [1.0000000000001, 2], 'b': {'c': 1/3}})
    {'a': [1.0, 2], 'b': {'c': 0.333333333333}}
    >>> rounded_tree([float('inf'), -float('inf')])
    ['inf', '-inf']
    """
    if isinstance(obj, Mapping):
        return {k: rounded_tree(v, digits) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [rounded_tree(v, digits) for v in obj]
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    value = round_significant(obj, digits)
    return value if math.isfinite(value) else str(value)
