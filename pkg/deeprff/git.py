import os
import subprocess

from deeprff import __version__


class GitError(Exception): pass


def describe(path=None):
    """Return `git describe --always --dirty` for the checkout holding path."""
    path = path or os.path.dirname(os.path.abspath(__file__))
    try:
        result = subprocess.run(
            ['git', 'describe', '--always', '--dirty'], cwd=path,
            stdout=subprocess.PIPE, stderr=subprocess.PIPE, check=True)
    except (OSError, subprocess.CalledProcessError) as e:
        raise GitError('cannot describe {}: {}'.format(path, e))
    return result.stdout.decode('utf-8').strip()


def build_id():
    """Package version plus the git revision when running from a checkout."""
    try:
        return '{}+{}'.format(__version__, describe())
    except GitError:
        return __version__
