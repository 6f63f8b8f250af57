"""Running the packaged pipelines from Python.

Each command of the ``nvreadout`` program is also available as
``run_pipeline``; the bundled reference.ini holds a complete set of inputs.
"""

from nvreadout import data_path
from nvreadout.shell import COMMANDS, load_config, run_pipeline

cfg = load_config(str(data_path("reference.ini")))
for command in COMMANDS:
    print(run_pipeline(cfg, command).to_text())
