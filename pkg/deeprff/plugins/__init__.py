"""Plugin registry.

A plugin is a module with a `load(plugin)` function that registers its
commands and typed settings. Plugins are found through the
`deeprff.plugins` entry point group, or imported by dotted module name.
"""
from collections import OrderedDict
from importlib import import_module
from importlib.metadata import entry_points
from inspect import isclass, ismodule

from deeprff.plugins.settings import Settings


DEFAULT_PLUGINS = ('deeprff.core', 'deeprff.experiments')

plugins = OrderedDict()


def commands_in(module):
    """Concrete `Cmd` subclasses exported by module (its `__all__`)."""
    from deeprff.cmds import Cmd
    names = getattr(module, '__all__', None) or vars(module).keys()
    for name in names:
        value = getattr(module, name)
        if name.startswith('_') or not isclass(value):
            continue
        if issubclass(value, Cmd) and not value.abstract:
            yield value


class Plugin:
    def __init__(self, mod, name):
        self.mod = mod
        self.name = name
        self.cmds = {}
        self.settings = Settings()

    def load(self):
        load = getattr(self.mod, 'load', None)
        if load is not None:
            load(self)

    def add_cmds(self, cmds):
        if ismodule(cmds):
            cmds = commands_in(cmds)
        for cmd_class in cmds:
            for name in cmd_class.names:
                self.cmds[name] = cmd_class(name)

    def add_settings(self, **variables):
        self.settings.variables.update(variables)


def sorted_plugins():
    return sorted(plugins.values(), key=lambda plugin: plugin.name)


def load_plugin(name):
    """Load the plugin registered as name, or the module called name."""
    found = {ep.name: ep for ep in entry_points(group='deeprff.plugins')}
    if name in found:
        mod = found[name].load()
    else:
        mod = import_module(name)
        name = mod.__name__.rpartition('.')[2]
    if name in plugins:
        raise ImportError('plugin "{}" is already loaded'.format(name))
    plugin = plugins[name] = Plugin(mod, name)
    plugin.load()
    return plugin


def load_default_plugins():
    for module in DEFAULT_PLUGINS:
        if module.rpartition('.')[2] not in plugins:
            load_plugin(module)
    return plugins
