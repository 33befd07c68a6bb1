import os

from deeprff.cmds import Cmd
from deeprff.cmds.types import positive_int
from deeprff.targets import DEFAULT_A, TARGETS, gen_dataset, save_dataset


__all__ = ['Data']


class Data(Cmd):
    description = 'generate training and test data'

    def setup(self):
        self.parser.add_argument('action', choices=('gen',))
        self.parser.add_argument('--n', type=positive_int, required=True,
                                 help='number of training points')
        self.parser.add_argument('--n-test', type=positive_int,
                                 help='number of test points (default: n)')
        self.parser.add_argument('--d', type=positive_int, required=True,
                                 help='input dimension')
        self.parser.add_argument('--target', choices=sorted(TARGETS),
                                 default='f1')
        self.parser.add_argument('--a', type=float, default=DEFAULT_A)
        self.parser.add_argument('--noise', type=float, default=0.0)
        self.parser.add_argument('--seed', type=int)
        self.parser.add_argument('--raw-targets', action='store_false',
                                 dest='normalize_targets',
                                 help='do not normalize the targets')
        self.parser.add_argument('-o', '--output',
                                 help='directory (default: core.output)')

    def do(self, args):
        train, test = gen_dataset(
            args.n, args.d, args.target, args.a, self.seed(args), args.n_test,
            args.normalize_targets, args.noise)
        output = self.output_dir(args)
        os.makedirs(output, exist_ok=True)
        for name, dataset in (('train', train), ('test', test)):
            path = os.path.join(output, '{}.csv'.format(name))
            save_dataset(dataset, path)
            self.print('wrote {} ({} points)'.format(path, len(dataset)))
