import logging

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from Curveflowapp.exceptions import ConfigError, CurveflowError
from Curveflowapp.experiments import EXIT_CONFIG, EXIT_OK
from Curveflowapp.utils import resolve_config

logger = logging.getLogger(__name__)


class ExperimentCommand(BaseCommand):
    """Shared flags, config resolution and exit codes of the harness commands.

    Subclasses set `schema` and `defaults` and implement `run_experiment(cfg)`
    returning an ExperimentResult.
    """

    schema = {}
    defaults = {}

    def add_arguments(self, parser):
        parser.add_argument('--config', dest='config', help='flat "key = value" experiment file')
        parser.add_argument('--seed', type=int, help='64-bit generator seed')
        parser.add_argument('--out', help='output directory')
        parser.add_argument('--K', type=int, choices=[-1, 0, 1], help='sectional curvature of the space form')
        parser.add_argument('--N', type=int, help='number of grid points')
        parser.add_argument('--stencil-order', dest='stencil_order', type=int, choices=[2, 4])
        self.add_experiment_arguments(parser)

    def add_experiment_arguments(self, parser):
        pass

    def run_experiment(self, cfg):
        raise NotImplementedError

    def experiment_defaults(self):
        return {
            **self.defaults,
            'out': settings.CURVEFLOW_OUTPUT_DIR,
            'delta_pole': settings.CURVEFLOW_DELTA_POLE,
            'eps_convex': settings.CURVEFLOW_EPS_CONVEX,
            'stencil_order': settings.CURVEFLOW_STENCIL_ORDER,
        }

    def handle(self, *args, **options):
        overrides = {key: options.get(key) for key in self.schema if key in options}
        try:
            cfg = resolve_config(self.schema, self.experiment_defaults(), options.get('config'), overrides)
            result = self.run_experiment(cfg)
        except (ConfigError, CurveflowError) as e:
            logger.error("configuration error: %s", e)
            raise CommandError(str(e), returncode=EXIT_CONFIG)

        for name, path in result.artifacts.items():
            self.stdout.write(f"{name}: {path}")
        if result.exit_code != EXIT_OK:
            raise CommandError("; ".join(result.failures), returncode=result.exit_code)
        self.stdout.write(self.style.SUCCESS("all checks passed"))
