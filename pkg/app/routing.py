from dataclasses import dataclass, field
from typing import Any, Awaitable, Callable, Optional

from app.models import Command
from app.utils import resolve_path


@dataclass(frozen=True)
class Option:
    flags: tuple[str, ...]
    kwargs: dict

    @property
    def dest(self) -> str:
        return self.kwargs.get("dest") or self.flags[0].lstrip("-").replace("-", "_")


def option(*flags: str, **kwargs) -> Option:
    return Option(flags, kwargs)


@dataclass(frozen=True)
class RunContext:
    config_path: Optional[str] = None

    def resolve(self, path: str) -> str:
        return resolve_path(path, self.config_path)


Handler = Callable[[Any, RunContext], Awaitable[int]]


@dataclass(frozen=True)
class RegisteredCommand:
    name: Command
    summary: str
    description: str
    options: tuple[Option, ...]
    handler: Handler


@dataclass
class CommandRouter:
    title: str = ""
    version: str = ""
    description: str = ""
    commands: dict[Command, RegisteredCommand] = field(default_factory=dict)
    exception_handlers: dict[type, Callable[[Exception], int]] = field(default_factory=dict)

    def command(self, name: Command, summary: str, description: str = "", options: tuple[Option, ...] = ()):
        def decorator(handler: Handler) -> Handler:
            if name in self.commands:
                raise ValueError(f"Command already registered: {name}")
            self.commands[name] = RegisteredCommand(name, summary, description or summary, tuple(options), handler)
            return handler
        return decorator

    def include_router(self, router: "CommandRouter") -> None:
        for registered in router.commands.values():
            if registered.name in self.commands:
                raise ValueError(f"Command already registered: {registered.name}")
            self.commands[registered.name] = registered

    def exception_handler(self, exc_class: type):
        def decorator(handler: Callable[[Exception], int]) -> Callable[[Exception], int]:
            self.exception_handlers[exc_class] = handler
            return handler
        return decorator

    def handler_for(self, exc: Exception) -> Optional[Callable[[Exception], int]]:
        # Most specific registered class wins
        for cls in type(exc).__mro__:
            if cls in self.exception_handlers:
                return self.exception_handlers[cls]
        return None
