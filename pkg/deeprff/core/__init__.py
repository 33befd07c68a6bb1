import os
import sys

from deeprff.plugins.settings import *


LOG_LEVELS = ('debug', 'info', 'warning', 'error')


def _env_int(name, default):
    value = os.environ.get(name)
    if value is None or not value.strip():
        return default
    try:
        return int(value)
    except ValueError:
        raise ValueError('{} must be an integer, got "{}"'.format(name, value))


def load(plugin):
    from deeprff.core import cmds
    plugin.add_cmds(cmds)
    plugin.add_settings(
        debug=BoolSetting(default=False),
        color=BoolSetting(default=sys.stderr.isatty()),
        pdb_module=StrSetting(default='pdb'),
        seed=IntSetting(default=_env_int('DEEPRFF_SEED', 0), minimum=0),
        threads=IntSetting(default=_env_int('DEEPRFF_THREADS', 1), minimum=1),
        output=StrSetting(default='results'),
        log_level=StrSetting(default='info', choices=LOG_LEVELS),
    )
