__all__ = [
    'Setting', 'BoolSetting', 'IntSetting', 'FloatSetting', 'StrSetting',
    'IntListSetting', 'Settings',
]


class Setting:
    def __init__(self, default=None, choices=None, help=None):
        self.default = default
        self.choices = choices
        self.help = help

    def clean(self, value):
        if value is None:
            return None
        if not self.choices is None and not value in self.choices:
            raise ValueError('value must be in {}'.format(self.choices))
        return value

    def format(self, value):
        if value is None:
            return '<null>'
        return str(value)


class BoolSetting(Setting):
    def clean(self, value):
        if value == 'on':
            value = True
        elif value == 'off':
            value = False
        elif not isinstance(value, bool) and value is not None:
            raise ValueError('value must be a boolean')
        return super().clean(value)

    def format(self, value):
        if value is True:
            return 'on'
        elif value is False:
            return 'off'
        else:
            return super().format(value)


class IntSetting(Setting):
    def __init__(self, default=None, choices=None, help=None, minimum=None):
        super().__init__(default, choices, help)
        self.minimum = minimum

    def clean(self, value):
        if value is None:
            return None
        if isinstance(value, bool) or isinstance(value, float):
            raise ValueError('value must be an integer')
        if not isinstance(value, int):
            value = int(value)
        if self.minimum is not None and value < self.minimum:
            raise ValueError('value must be at least {}'.format(self.minimum))
        return super().clean(value)


class FloatSetting(Setting):
    def __init__(self, default=None, choices=None, help=None, minimum=None):
        super().__init__(default, choices, help)
        self.minimum = minimum

    def clean(self, value):
        if value is None:
            return None
        if isinstance(value, bool):
            raise ValueError('value must be a number')
        value = float(value)
        if value != value:
            raise ValueError('value must be a number')
        if self.minimum is not None and value < self.minimum:
            raise ValueError('value must be at least {}'.format(self.minimum))
        return super().clean(value)

    def format(self, value):
        if value is None:
            return super().format(value)
        return repr(value)


class StrSetting(Setting):
    def clean(self, value):
        if not isinstance(value, str) and value is not None:
            raise ValueError('value must be a string')
        return super().clean(value)


class IntListSetting(Setting):
    """A list of positive integers, given as a list or as "10,20,40"."""

    def clean(self, value):
        if value is None:
            return None
        if isinstance(value, str):
            value = [item for item in value.split(',') if item.strip()]
        try:
            items = [int(item) for item in value]
        except (TypeError, ValueError):
            raise ValueError('value must be a list of integers')
        if any(isinstance(item, float) for item in value):
            raise ValueError('value must be a list of integers')
        if not items or any(item < 1 for item in items):
            raise ValueError('value must list positive integers')
        return super().clean(items)

    def format(self, value):
        if value is None:
            return super().format(value)
        return ','.join(str(item) for item in value)


class Settings:
    def __init__(self):
        self.variables = {}
        self.data = {}

    def __getattr__(self, key):
        try:
            return self[key]
        except KeyError as e:
            raise AttributeError(e)

    def __setattr__(self, key, value):
        if key in ('variables', 'data') or not key in self:
            super().__setattr__(key, value)
        else:
            self[key] = value

    def __getitem__(self, key):
        try:
            variable = self.variables[key]
        except KeyError:
            raise KeyError('invalid setting "{}"'.format(key))
        return self.data.get(key, variable.default)

    def __setitem__(self, key, value):
        try:
            variable = self.variables[key]
        except KeyError:
            raise KeyError('invalid setting "{}"'.format(key))
        self.data[key] = variable.clean(value)

    def __len__(self):
        return len(self.variables)

    def __contains__(self, key):
        return key in self.variables

    def keys(self):
        return self.variables.keys()

    def get_display(self, key):
        try:
            variable = self.variables[key]
        except KeyError:
            raise KeyError('invalid setting "{}"'.format(key))
        value = self.data.get(key, variable.default)
        return variable.format(value)
