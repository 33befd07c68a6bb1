import json
import os

from deeprff.cmds import Cmd
from deeprff.conf import settings
from deeprff.experiments.config import ExperimentConfig
from deeprff.experiments.runner import (
    compare_methods, run_experiment, sweep_kl, write_outputs)
from deeprff.table import Table
from deeprff.theory import run_all


__all__ = ['Train', 'Sweep', 'Compare', 'VerifyTheory']


SUMMARY_COLUMNS = ('method', 'K', 'L', 'KL', 'replicas', 'mean', 'std',
                   'bar_low', 'bar_high')


class ExperimentCmd(Cmd):
    abstract = True

    def setup(self):
        ExperimentConfig.add_arguments(self.parser)
        self.parser.add_argument(
            '--no-models', action='store_false', dest='save_models',
            help='do not write the trained model files')

    def get_config(self, args):
        session = {key: settings.core[key]
                   for key in ('seed', 'threads', 'output')}
        return ExperimentConfig.from_args(args, defaults=session).validate()

    def log_dir(self, cfg):
        path = os.path.join(cfg.output, 'logs')
        os.makedirs(path, exist_ok=True)
        return path

    def print_results(self, results):
        self.print_table(Table.from_dicts(
            [result.summary() for result in results], SUMMARY_COLUMNS))


class Train(ExperimentCmd):
    description = 'train replicated networks and report the test error'

    def do(self, args):
        cfg = self.get_config(args)
        if cfg.kl is not None:
            raise self.error('use "sweep" for a list of node counts')
        result = run_experiment(cfg, log_dir=self.log_dir(cfg))
        output = write_outputs(cfg, [result], save_models=args.save_models)
        self.print_results([result])
        self.print('results written to {}'.format(output))


class Sweep(ExperimentCmd):
    description = 'sweep the total node count and fit the error decay'

    def do(self, args):
        cfg = self.get_config(args)
        sweep = sweep_kl(cfg, log_dir=self.log_dir(cfg))
        output = write_outputs(cfg, sweep.results, extra={
            'slope': sweep.slope}, save_models=args.save_models)
        self.print_results(sweep.results)
        self.print('log-log slope of the mean error: {:.4f}'.format(
            sweep.slope))
        self.print('results written to {}'.format(output))


class Compare(ExperimentCmd):
    description = 'compare two training methods on matched seeds'

    def setup(self):
        super().setup()
        self.parser.add_argument(
            '--against', type=int, choices=(1, 2, 3), required=True,
            help='method to compare with --method')

    def do(self, args):
        first = self.get_config(args)
        second = first.replace(method=args.against).validate()
        comparison = compare_methods(first, second,
                                     log_dir=self.log_dir(first))
        results = [comparison.first, comparison.second]
        output = write_outputs(first, results, extra={
            'better': comparison.better, 'win_rate': comparison.win_rate,
        }, save_models=args.save_models)
        table = Table('replica', 'seed', 'method {}'.format(first.method),
                      'method {}'.format(second.method))
        for replica, (seed, a, b) in enumerate(zip(
                comparison.first.seeds, comparison.first.errors,
                comparison.second.errors)):
            table.add_row(replica, seed, a, b)
        self.print_table(table)
        self.print_results(results)
        self.print('method {} has the lower mean error and wins {:.0%} of '
                   'the paired replicas'.format(comparison.better,
                                                comparison.win_rate))
        self.print('results written to {}'.format(output))


class VerifyTheory(Cmd):
    description = 'run the numerical checks of the approximation theory'

    def setup(self):
        self.parser.add_argument('--seed', type=int,
                                 help='master seed (default: core.seed)')
        self.parser.add_argument('-o', '--output',
                                 help='write a JSON summary to this file')

    def do(self, args):
        reports = run_all(self.seed(args))
        for report in reports:
            self.print(report.format())
        failed = [report.name for report in reports if not report.passed]
        if args.output:
            with open(args.output, 'w') as f:
                json.dump({
                    'passed': not failed,
                    'checks': [{'name': r.name, 'passed': r.passed,
                                'values': r.values} for r in reports],
                }, f, indent=1)
        if failed:
            raise self.error('{} check(s) failed: {}'.format(
                len(failed), ', '.join(failed)))
        self.print('all {} checks passed'.format(len(reports)))
