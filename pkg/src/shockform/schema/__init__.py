import json
import logging
import math

import numpy as np

logger = logging.getLogger('shockform.schema')


def plain(value):
    """
    Convert numpy scalars/arrays, nested schemas and non-finite floats into JSON-ready values.
    """
    if isinstance(value, Schema):
        return value.as_dict()
    if isinstance(value, dict):
        return {str(k): plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [plain(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        # JSON has no NaN or infinity
        return value if math.isfinite(value) else None
    return value


class Schema:
    def __init__(self, bootstrap=None, **kwargs):
        if bootstrap is None:
            pass
        elif isinstance(bootstrap, (str, bytes)):
            self.hydrate(bootstrap)
        elif isinstance(bootstrap, dict):
            self.hydrate_dict(bootstrap)
        else:
            from ..error import Malformed
            raise Malformed(f"Invalid type for schema bootstrap: {type(bootstrap)}: {bootstrap}")

        if len(kwargs) > 0:
            self.hydrate_dict(kwargs)

    def hydrate(self, payload: str | bytes):
        """
        Hydrate object from a JSON string.
        """
        from ..error import Malformed

        try:
            d = json.loads(payload)
        except json.JSONDecodeError as e:
            raise Malformed(f"Invalid JSON for {self.__class__.__name__}: {e}")

        self.hydrate_dict(d)

    def hydrate_dict(self, d: dict):
        """
        Hydrate object from a dictionary.
        """
        from ..error import Malformed

        if not isinstance(d, dict):
            raise Malformed(f"d is not a dict: {type(d).__name__}: {d}")

        for k, v in d.items():
            if k[0] == '_':
                logger.warning(f"Attempted to hydrate illegal property '{k}' on {self.__class__.__name__}")
                continue

            if hasattr(self, k):
                if hasattr(self, f"_set_{k}"):
                    fn = getattr(self, f"_set_{k}")
                    fn(v)
                else:
                    setattr(self, k, v)
            else:
                logger.warning(f"No property '{k}' to hydrate on {self.__class__.__name__}")

        if hasattr(self, "_validate"):
            self._validate()

    def as_dict(self) -> dict:
        d = {}
        for k in dir(self):
            if k[0] == '_':
                continue
            v = getattr(type(self), k, None)
            if isinstance(v, property):
                continue
            v = getattr(self, k)
            if callable(v):
                continue
            d[k] = plain(v)
        return d

    def marshal(self) -> str:
        """
        Generate JSON from the object properties, keys sorted so identical runs give identical bytes.
        """
        return json.dumps(self.as_dict(), sort_keys=True, indent=2)
