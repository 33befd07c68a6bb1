from argparse import ArgumentTypeError

from deeprff.model import ModelFormatError, load


def positive_int(arg):
    try:
        value = int(arg)
    except ValueError:
        raise ArgumentTypeError('"{}" is not an integer'.format(arg))
    if value < 1:
        raise ArgumentTypeError('"{}" must be positive'.format(arg))
    return value


def model_file(path):
    try:
        return load(path)
    except IOError as e:
        raise ArgumentTypeError(e)
    except ModelFormatError as e:
        raise ArgumentTypeError('{}: {}'.format(path, e))
