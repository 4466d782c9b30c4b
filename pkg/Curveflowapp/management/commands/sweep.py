from Curveflowapp.experiments import SWEEP_DEFAULTS, SWEEP_SCHEMA, cmd_sweep

from ._base import ExperimentCommand


class Command(ExperimentCommand):
    help = "Check the inequalities on n seeded random curves."

    schema = SWEEP_SCHEMA
    defaults = SWEEP_DEFAULTS

    def add_experiment_arguments(self, parser):
        parser.add_argument('--n', type=int, help='number of sampled curves')
        parser.add_argument('--r0', type=float, help='base radius of the samples')
        parser.add_argument('--nonconvex', action='store_true', default=None,
                            help='sample non-convex star-shaped curves (K=-1 only)')
        parser.add_argument('--workers', type=int, help='worker processes')

    def run_experiment(self, cfg):
        return cmd_sweep(cfg)
