"""
Command run configuration.
"""

from dataclasses import dataclass, field

from django.conf import settings

from core.exceptions import CapExceededError, ParameterError

FORMATS = ('csv', 'json')


@dataclass(frozen=True)
class RunConfig:
    """
    Everything a command run depends on. Two runs with equal configs write
    byte-identical output.
    """
    command: str
    tol: float
    seed: int
    output_format: str
    out: str = None
    options: dict = field(default_factory=dict)

    @classmethod
    def from_options(cls, command, options, default_format='json'):
        """
        Raises:
            ParameterError: tol <= 0 or an unknown output format
            CapExceededError: --steps, --horizon or --kmax above PQWALK_MAX_STEPS
        """
        tol = options.get('tol')
        tol = settings.PQWALK_TOL if tol is None else float(tol)
        if not tol > 0:
            raise ParameterError("--tol must be positive", tol=tol)
        seed = options.get('seed')
        seed = settings.PQWALK_SEED if seed is None else int(seed)
        output_format = options.get('format') or default_format
        if output_format not in FORMATS:
            raise ParameterError(f"Unknown output format '{output_format}'", format=output_format, choices=list(FORMATS))

        for key in ('steps', 'horizon', 'kmax'):
            value = options.get(key)
            if value is not None and value > settings.PQWALK_MAX_STEPS:
                raise CapExceededError(
                    f"--{key} {value} is above the cap {settings.PQWALK_MAX_STEPS}",
                    **{key: value, 'cap': settings.PQWALK_MAX_STEPS},
                )

        common = {'tol', 'seed', 'format', 'out', 'verbosity', 'settings', 'pythonpath', 'traceback',
                  'no_color', 'force_color', 'skip_checks', 'stdout', 'stderr'}
        return cls(
            command=command,
            tol=tol,
            seed=seed,
            output_format=output_format,
            out=options.get('out'),
            options={key: value for key, value in options.items() if key not in common},
        )

    def get(self, key, default=None):
        value = self.options.get(key)
        return default if value is None else value


@dataclass(frozen=True)
class ReproCheck:
    """One reproduced number: ``residual`` compared against ``threshold``."""
    suite: str
    check: str
    value: float
    expected: float
    residual: float
    threshold: float

    @property
    def passed(self):
        return bool(self.residual <= self.threshold)

    def as_dict(self):
        return {
            'suite': self.suite,
            'check': self.check,
            'value': self.value,
            'expected': self.expected,
            'residual': self.residual,
            'threshold': self.threshold,
            'passed': self.passed,
        }
