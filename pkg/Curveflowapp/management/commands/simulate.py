from Curveflowapp.experiments import SIMULATE_DEFAULTS, SIMULATE_SCHEMA, cmd_simulate
from Curveflowapp.flow import SpeedLaw

from ._base import ExperimentCommand
from ._curve_arguments import add_curve_arguments


class Command(ExperimentCommand):
    help = "Run a curve flow, writing the trace CSV, snapshots, a JSON summary and an SVG overlay."

    schema = SIMULATE_SCHEMA
    defaults = SIMULATE_DEFAULTS

    def add_experiment_arguments(self, parser):
        add_curve_arguments(parser)
        parser.add_argument('--law', choices=SpeedLaw.values)
        parser.add_argument('--sigma', type=float, help='CFL safety factor')
        parser.add_argument('--t-end', dest='t_end', type=float)
        parser.add_argument('--eps-stationary', dest='eps_stationary', type=float)
        parser.add_argument('--report-stride', dest='report_stride', type=int)
        parser.add_argument('--snapshot-stride', dest='snapshot_stride', type=int)
        parser.add_argument('--dt-max', dest='dt_max', type=float)
        parser.add_argument('--refine-on-failure', dest='refine_on_failure', action='store_true', default=None)
        parser.add_argument('--no-svg', dest='svg', action='store_false', default=None)

    def run_experiment(self, cfg):
        return cmd_simulate(cfg)
