"""
Command registration and argument parsing
"""

import argparse
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional

from qpart.core.errors import InputError

Handler = Callable[[argparse.Namespace], None]
Arguments = Callable[[argparse.ArgumentParser], None]


class ArgumentParser(argparse.ArgumentParser):
    """argparse parser that raises InputError instead of exiting on bad usage"""

    def error(self, message: str):
        raise InputError(f"{self.prog}: {message}")


@dataclass(frozen=True)
class Command:
    name: str
    help: str
    arguments: Arguments
    handler: Handler


class CommandRouter:
    """Collects commands; routers nest like API routers"""

    def __init__(self):
        self.commands: Dict[str, Command] = {}

    def command(self, name: str, help: str, arguments: Arguments) -> Callable[[Handler], Handler]:
        """Register the decorated function as the handler of `name`"""

        def register(handler: Handler) -> Handler:
            if name in self.commands:
                raise ValueError(f"command '{name}' registered twice")
            self.commands[name] = Command(name, help, arguments, handler)
            return handler

        return register

    def include_router(self, router: "CommandRouter") -> None:
        for command in router.commands.values():
            if command.name in self.commands:
                raise ValueError(f"command '{command.name}' registered twice")
            self.commands[command.name] = command

    @property
    def names(self) -> List[str]:
        return list(self.commands)

    def build_parser(self, prog: str = "qpart", description: Optional[str] = None) -> ArgumentParser:
        parser = ArgumentParser(prog=prog, description=description, allow_abbrev=False)
        parser.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING or ERROR")
        parser.add_argument("--log-format", default=None, choices=("text", "json"))
        subparsers = parser.add_subparsers(dest="command", metavar="COMMAND")
        subparsers.required = True
        for command in self.commands.values():
            sub = subparsers.add_parser(
                command.name, help=command.help, description=command.help, allow_abbrev=False
            )
            command.arguments(sub)
            sub.set_defaults(handler=command.handler)
        return parser
