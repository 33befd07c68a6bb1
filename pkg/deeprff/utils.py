import csv
import fcntl
import logging
import os
import struct
import sys
import termios
import traceback
from collections import namedtuple
from importlib import import_module

from colors import blue, red

from deeprff.conf import settings

__all__ = [
    'get_termsize', 'print_error', 'post_mortem', 'load_file',
    'setup_logging', 'write_csv',
]


TerminalGeometry = namedtuple('TerminalGeometry', ('lines', 'cols'))


def get_termsize(fd=1):
    try:
        geometry = struct.unpack(
            'hh', fcntl.ioctl(fd, termios.TIOCGWINSZ, '1234'))
    except IOError:
        geometry = (25, 80)
    return TerminalGeometry(*geometry)


def print_error(line):
    if settings.core.color:
        line = red(str(line))
    print(line, file=sys.stderr)


def post_mortem():
    print_error('internal error (see traceback)')
    traceback.print_exc()
    if settings.core.debug:
        try:
            pdb = import_module(settings.core.pdb_module)
        except ImportError as e:
            print_error(e)
        else:
            try:
                pdb.post_mortem(sys.exc_info()[2])
            except KeyboardInterrupt:
                pass


def load_file(filename):
    return open(os.path.expanduser(filename))


class ColorFormatter(logging.Formatter):
    def __init__(self, color=False):
        super().__init__('%(levelname)s %(name)s: %(message)s')
        self.color = color

    def format(self, record):
        line = super().format(record)
        if not self.color:
            return line
        if record.levelno >= logging.WARNING:
            return red(line)
        if record.levelno == logging.INFO:
            return blue(line)
        return line


def setup_logging(stream=None):
    logger = logging.getLogger('deeprff')
    for handler in list(logger.handlers):
        if getattr(handler, 'deeprff_handler', False):
            logger.removeHandler(handler)
    handler = logging.StreamHandler(stream or sys.stderr)
    handler.deeprff_handler = True
    handler.setFormatter(ColorFormatter(settings.core.color))
    logger.addHandler(handler)
    logger.setLevel(settings.core.log_level.upper())
    return logger


def write_csv(path, fieldnames, rows):
    with open(path, 'w', newline='') as f:
        writer = csv.DictWriter(f, fieldnames=fieldnames, lineterminator='\n')
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
