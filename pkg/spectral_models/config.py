import singer

from spectral_models.codec import check_schema, read_json
from spectral_models.linalg import Field
from spectral_models.model_check import FILTERED, FLAVORS, SSet
from spectral_models.tot import Window


DEFAULT_FIELD = "Q"
DEFAULT_R = 1
DEFAULT_SEED = 0
DEFAULT_CASES = 50
DEFAULT_JOBS = 1
DEFAULT_LATTICE_BOUND = 4

# Keys a --config file may carry; each one names a CLI flag.
CONFIG_KEYS = ("field", "r", "s_set", "window", "seed", "cases", "jobs", "out",
               "flavor", "lattice_bound", "verbose")


def _critical(name, value, err):
    singer.log_critical("Invalid value passed for %s: %s (%s)", name, value, err)
    raise ValueError("invalid {}: {!r}: {}".format(name, value, err))


class RunConfig:
    # pylint: disable=too-many-arguments
    def __init__(self, command=None, inputs=(), field=DEFAULT_FIELD, r=None,
                 s_set=None, window=None, seed=DEFAULT_SEED, cases=DEFAULT_CASES,
                 jobs=DEFAULT_JOBS, out=None, flavor=None,
                 lattice_bound=DEFAULT_LATTICE_BOUND, verbose=False, **kwargs):
        self.command = command
        self.inputs = list(inputs or [])
        self.out = out
        self.verbose = bool(verbose)
        self.extra = kwargs

        try:
            self.field = field if isinstance(field, Field) else Field.parse(field or DEFAULT_FIELD)
        except ValueError as err:
            _critical("field", field, err)

        self.r_explicit = r is not None
        self.r = self._natural("r", r, DEFAULT_R)
        self.seed = self._natural("seed", seed, DEFAULT_SEED)
        self.cases = self._natural("cases", cases, DEFAULT_CASES)
        self.jobs = self._natural("jobs", jobs, DEFAULT_JOBS)
        if self.jobs < 1:
            _critical("jobs", jobs, "at least one worker is needed")
        self.lattice_bound = self._natural("lattice_bound", lattice_bound, DEFAULT_LATTICE_BOUND)

        if flavor is not None and flavor not in FLAVORS:
            _critical("flavor", flavor, "expected one of {}".format(", ".join(FLAVORS)))
        self.flavor = flavor

        # Bicomplex S-sets must hold 0; a missing S defaults to {0, ..., r}.
        try:
            if s_set is None:
                self.s_set = SSet(range(self.r + 1), flavor or FILTERED)
            elif isinstance(s_set, SSet):
                self.s_set = s_set
            elif isinstance(s_set, str):
                self.s_set = SSet.parse(s_set, flavor or FILTERED)
            else:
                self.s_set = SSet(s_set, flavor or FILTERED)
        except ValueError as err:
            _critical("s_set", s_set, err)

        try:
            if window is None or isinstance(window, Window):
                self.window = window
            elif isinstance(window, dict):
                self.window = Window(window["col_lo"], window["col_hi"], window.get("margin", 2))
            else:
                self.window = Window.parse(window)
        except (ValueError, KeyError, TypeError) as err:
            _critical("window", window, err)

    @staticmethod
    def _natural(name, value, default):
        if value is None or value == "":
            return default
        try:
            value = int(value)
            if value < 0:
                raise ValueError("must be non-negative")
        except (ValueError, TypeError) as err:
            _critical(name, value, err)
        return value

    @classmethod
    def from_args(cls, args):
        """Flags given on the command line win over the --config file."""
        values = {}
        config_path = getattr(args, "config", None)
        if config_path:
            document = read_json(config_path)
            check_schema(document, "run_config", config_path)
            values.update(document)
        for key in CONFIG_KEYS:
            value = getattr(args, key, None)
            if value is not None and value is not False:
                values[key] = value
        return cls(command=getattr(args, "command", None),
                   inputs=getattr(args, "inputs", None) or [],
                   **{k: v for k, v in values.items() if k in CONFIG_KEYS})

    def to_dict(self):
        return {"command": self.command, "field": self.field.name, "r": self.r,
                "s_set": self.s_set.to_list(), "window": self.window.to_dict() if self.window else None,
                "seed": self.seed, "cases": self.cases, "jobs": self.jobs, "flavor": self.flavor,
                "lattice_bound": self.lattice_bound}

    def __repr__(self):
        return "RunConfig({})".format(self.to_dict())
