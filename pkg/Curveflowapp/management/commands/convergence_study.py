from Curveflowapp.experiments import CONVERGENCE_DEFAULTS, CONVERGENCE_SCHEMA, cmd_convergence_study

from ._base import ExperimentCommand
from ._curve_arguments import add_curve_arguments


class Command(ExperimentCommand):
    help = "Observed convergence orders of the Minkowski and Gauss-Bonnet residuals under refinement."

    schema = CONVERGENCE_SCHEMA
    defaults = CONVERGENCE_DEFAULTS

    def add_experiment_arguments(self, parser):
        add_curve_arguments(parser)
        parser.add_argument('--N-list', dest='N_list', help='comma-separated grid sizes')
        parser.add_argument('--orders', help='comma-separated stencil orders')
        parser.add_argument('--negative-control', dest='negative_control', action='store_true', default=None,
                            help='use a curve with a curvature kink; no order is asserted')

    def run_experiment(self, cfg):
        return cmd_convergence_study(cfg)
