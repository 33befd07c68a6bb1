from deeprff.plugins import plugins


class GlobalSettings:
    """Settings of all loaded plugins, addressed as settings.<plugin>.<key>."""

    def __getattr__(self, key):
        try:
            return self[key]
        except KeyError as e:
            raise AttributeError(e)

    def __getitem__(self, key):
        try:
            plugin = plugins[key]
        except KeyError:
            raise KeyError('invalid plugin "{}"'.format(key))
        return plugin.settings

    def keys(self):
        return plugins.keys()

    def parse_and_set(self, var):
        """Apply "[plugin.]key=value", "key" (on) or "nokey" (off)."""
        var, eq, value = var.partition('=')
        plugin, _, var = var.rpartition('.')
        plugin = plugin or 'core'
        if not eq:
            value = not var.startswith('no')
            if not value:
                var = var[2:]
        self[plugin][var] = value

    def as_dict(self):
        return {
            name: {key: self[name].get_display(key)
                   for key in sorted(self[name].keys())}
            for name in self.keys()
        }


settings = GlobalSettings()
