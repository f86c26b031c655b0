"""Interface en ligne de commande : configuration, commandes et vérification."""

from .commands import COMMANDS, run_command
from .config import RunConfig, build_run_config, load_config_file
from .verify import CHECKS, CheckResult, run_verification

__all__ = [
    "COMMANDS", "run_command", "RunConfig", "build_run_config", "load_config_file",
    "CHECKS", "CheckResult", "run_verification",
]
