from Curveflowapp.experiments import RATE_DEFAULTS, RATE_SCHEMA, cmd_rate_study

from ._base import ExperimentCommand


class Command(ExperimentCommand):
    help = "Measure the exponential decay rate of one Fourier mode under the constrained flow."

    schema = RATE_SCHEMA
    defaults = RATE_DEFAULTS

    def add_experiment_arguments(self, parser):
        parser.add_argument('--r0', type=float)
        parser.add_argument('--m', type=int, help='perturbed mode')
        parser.add_argument('--eps', type=float, help='initial amplitude')
        parser.add_argument('--sigma', type=float)
        parser.add_argument('--t-end', dest='t_end', type=float)
        parser.add_argument('--eps-stationary', dest='eps_stationary', type=float)
        parser.add_argument('--report-stride', dest='report_stride', type=int)
        parser.add_argument('--tolerance', type=float, help='accepted relative rate error')

    def run_experiment(self, cfg):
        return cmd_rate_study(cfg)
