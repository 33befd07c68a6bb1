def load(plugin):
    from deeprff.experiments import cmds
    plugin.add_cmds(cmds)
