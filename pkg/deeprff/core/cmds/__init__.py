from deeprff.core.cmds.shell import *
from deeprff.core.cmds.data import *
from deeprff.core.cmds.model import *
