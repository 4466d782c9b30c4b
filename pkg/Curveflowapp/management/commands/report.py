from Curveflowapp.experiments import REPORT_DEFAULTS, REPORT_SCHEMA, cmd_report

from ._base import ExperimentCommand
from ._curve_arguments import add_curve_arguments


class Command(ExperimentCommand):
    help = "Evaluate every geometric functional on one curve and write report.json."

    schema = REPORT_SCHEMA
    defaults = REPORT_DEFAULTS

    def add_experiment_arguments(self, parser):
        add_curve_arguments(parser)

    def run_experiment(self, cfg):
        return cmd_report(cfg)
