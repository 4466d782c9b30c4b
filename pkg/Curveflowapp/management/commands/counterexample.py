from Curveflowapp.experiments import COUNTEREXAMPLE_DEFAULTS, COUNTEREXAMPLE_SCHEMA, cmd_counterexample

from ._base import ExperimentCommand


class Command(ExperimentCommand):
    help = "Certify the hemisphere counterexample on rho = r0 + eps cos(m theta)."

    schema = COUNTEREXAMPLE_SCHEMA
    defaults = COUNTEREXAMPLE_DEFAULTS

    def add_experiment_arguments(self, parser):
        parser.add_argument('--r0', type=float)
        parser.add_argument('--eps', type=float, help='perturbation amplitude')
        parser.add_argument('--m', type=int, help='perturbation mode')

    def run_experiment(self, cfg):
        return cmd_counterexample(cfg)
