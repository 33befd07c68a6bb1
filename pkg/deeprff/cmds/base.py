import logging
import re
import sys
from argparse import ArgumentParser

from deeprff.conf import settings
from deeprff.model import ModelFormatError


aliases = {
    'man': 'help',
    '.': 'source',
}


class CmdError(Exception): pass


class CmdExit(Exception):
    def __init__(self, status=None):
        super().__init__()
        self.status = status


class CmdArgumentParser(ArgumentParser):
    def __init__(self, cmd):
        super().__init__(prog=cmd.name, description=cmd.description)
        self.cmd = cmd

    def exit(self, status=0, message=None):
        if message:
            self._print_message(message)
        raise CmdExit(status)

    def error(self, message):
        raise self.cmd.error(message)


def command_name(cls_name):
    """CamelCase class name to the dashed command name.

    >>> command_name('VerifyTheory')
    'verify-theory'
    """
    return re.sub(r'(?!^)([A-Z])', r'-\1', cls_name).lower()


class CmdBase(type):
    def __new__(cls, cls_name, bases, attrs):
        if any(isinstance(b, CmdBase) for b in bases):
            attrs.setdefault('names', (command_name(cls_name),))
        attrs.setdefault('abstract', False)
        return super().__new__(cls, cls_name, bases, attrs)


class Cmd(metaclass=CmdBase):
    """A shell command: an argument parser plus `do(args)`.

    Exceptions listed in `library_errors` are reported as
    `CmdError('<name>: <message>')`. Output is buffered and written once the
    command finishes, also when it fails.
    """
    description = 'undocumented'
    abstract = True
    library_errors = (ValueError, OSError, ModelFormatError)

    def __init__(self, name):
        self.name = name
        self.logger = logging.getLogger('deeprff.cmds.{}'.format(name))
        self.parser = CmdArgumentParser(self)
        self.output = ''
        self.setup()

    def setup(self):
        pass

    def format_help(self):
        return self.parser.format_help()

    def run(self, *argv):
        try:
            args = self.parser.parse_args(argv)
            self.logger.debug('running %s', ' '.join(argv) or '(no args)')
            self.do(args)
        except CmdExit:
            return
        except self.library_errors as e:
            raise self.error(e)
        finally:
            self.flush()

    def error(self, message):
        return CmdError('{}: {}'.format(self.name, message))

    def seed(self, args):
        seed = getattr(args, 'seed', None)
        return settings.core.seed if seed is None else seed

    def output_dir(self, args):
        return getattr(args, 'output', None) or settings.core.output

    def print(self, *args, sep=' ', end='\n'):
        self.output += sep.join(str(arg) for arg in args) + end

    def print_table(self, table):
        self.print(table.render(), end='')

    def flush(self):
        if self.output:
            sys.stdout.write(self.output)
            sys.stdout.flush()
        self.output = ''

    def do(self, args):
        raise NotImplementedError
