import os

# drifting remark with blank lines around it

VALUE = os.getpid()
