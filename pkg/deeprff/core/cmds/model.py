import numpy as np

from deeprff.cmds import Cmd
from deeprff.cmds.types import model_file
from deeprff.layerwise import layer_mse_trace
from deeprff.model import predict
from deeprff.table import Table
from deeprff.targets import load_dataset


__all__ = ['Eval']


class Eval(Cmd):
    description = 'evaluate a saved model on a data file'
    # a data sidecar without norm_stats
    library_errors = Cmd.library_errors + (KeyError,)

    def setup(self):
        self.parser.add_argument('--model', type=model_file, required=True)
        self.parser.add_argument('--data', required=True,
                                 help='csv file written by "data gen"')
        self.parser.add_argument('--staged', action='store_true',
                                 help='report the error after every block')

    def do(self, args):
        net = args.model
        data = load_dataset(args.data)
        if data.dim != net.input_dim:
            raise self.error('model expects {} inputs, data has {}'.format(
                net.input_dim, data.dim))
        error = predict(net, data.inputs) - data.targets
        table = Table('points', 'layers', 'mse')
        table.add_row(len(data), net.depth, float(np.mean(error ** 2)))
        self.print_table(table)
        if args.staged:
            table = Table('block', 'mse')
            for index, mse in enumerate(layer_mse_trace(net, data)):
                table.add_row(index, float(mse))
            self.print_table(table)
