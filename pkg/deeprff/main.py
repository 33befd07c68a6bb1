import sys
from argparse import ArgumentParser, REMAINDER

from deeprff import __version__
from deeprff.conf import settings
from deeprff.utils import print_error, load_file, post_mortem, setup_logging
from deeprff.cmds import CmdError, cmd_execfile, cmd_execv
from deeprff.plugins import load_default_plugins


CONFIG_FILES = ['~/.deeprffrc', '.deeprffrc']


def load_config():
    for filename in CONFIG_FILES:
        try:
            f = load_file(filename)
        except IOError:
            continue
        with f:
            cmd_execfile(f)


def main(argv=None):
    parser = ArgumentParser(
        description='deep residual random Fourier feature networks')
    parser.add_argument(
        '-n', '--no-config', action='store_false', dest='load_config',
        default=True, help='prevent loading of default configuration files')
    parser.add_argument(
        '-d', '--debug', action='store_true', default=False,
        help='drop into the debugger on internal errors')
    parser.add_argument(
        '--no-color', action='store_false', dest='color', default=None,
        help='disable colored output')
    parser.add_argument(
        '-v', '--version', action='store_true', dest='print_version',
        default=False, help='print version information')
    parser.add_argument('cmd', nargs=REMAINDER, help='execute a command')

    args = parser.parse_args(argv)

    if args.print_version:
        print('deeprff {}'.format(__version__))
        return

    try:
        load_default_plugins()
    except ValueError as e:
        # core settings are not available yet
        print(e, file=sys.stderr)
        sys.exit(1)
    if args.debug:
        settings.core.debug = True
    if args.color is False:
        settings.core.color = False

    try:
        setup_logging()
        if args.load_config:
            load_config()

        if args.cmd:
            cmd_execv(args.cmd)
        else:
            cmd_execfile(sys.stdin)
    except CmdError as e:
        print_error(e)
        sys.exit(1)
    except Exception:
        post_mortem()
        sys.exit(1)
