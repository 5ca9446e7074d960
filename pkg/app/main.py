import argparse
import logging
import sys
from typing import Optional, Sequence

import anyio

from app.build_routes import build_router
from app.exceptions import ConfigError, PadeLabError
from app.pade_routes import pade_router
from app.routing import CommandRouter, RunContext
from app.utils import get_log_level
from app.validation import config_from_mapping, load_mapping, load_series_coefficients

logger = logging.getLogger(__name__)

app = CommandRouter(
    title="pade-lab",
    version="0.1.0",
    description="Exact Padé approximants, pole placement witnesses and universal series builds.",
)

@app.exception_handler(PadeLabError)
def lab_error_handler(exc: PadeLabError) -> int:
    print(f"error: {exc.detail}", file=sys.stderr)
    return exc.exit_code

@app.exception_handler(ConfigError)
def config_error_handler(exc: ConfigError) -> int:
    print(f"error: {exc.detail}", file=sys.stderr)
    for error in exc.errors:
        print(f"  {error}", file=sys.stderr)
    return exc.exit_code

@app.exception_handler(FileNotFoundError)
def file_not_found_handler(exc: FileNotFoundError) -> int:
    print(f"error: file not found: {exc.filename}", file=sys.stderr)
    return ConfigError.exit_code

@app.exception_handler(KeyError)
def missing_field_handler(exc: KeyError) -> int:
    print(f"error: missing field {exc}", file=sys.stderr)
    return ConfigError.exit_code

@app.exception_handler(ZeroDivisionError)
def zero_denominator_handler(exc: ZeroDivisionError) -> int:
    print(f"error: zero denominator in input: {exc}", file=sys.stderr)
    return ConfigError.exit_code

@app.exception_handler(PermissionError)
def permission_error_handler(exc: PermissionError) -> int:
    print(f"error: permission denied: {exc.filename}", file=sys.stderr)
    return PadeLabError.exit_code

app.include_router(pade_router)
app.include_router(build_router)

class LabArgumentParser(argparse.ArgumentParser):
    """Argument errors are configuration errors, not argparse's exit 2."""

    def error(self, message: str):
        raise ConfigError(f"{self.prog}: {message}")

def build_parser() -> argparse.ArgumentParser:
    parser = LabArgumentParser(prog=app.title, description=app.description)
    parser.add_argument("--version", action="version", version=f"%(prog)s {app.version}")
    parser.add_argument("--seed", type=int, default=None, help="Seed for randomized drivers")
    parser.add_argument("--log-level", default=None, help="Logging level (default from PADE_LAB_LOG_LEVEL)")
    commands = parser.add_subparsers(dest="command", required=True)
    for registered in app.commands.values():
        sub = commands.add_parser(registered.name.value, help=registered.summary, description=registered.description)
        sub.add_argument("--config", default=None, help="Experiment configuration document")
        for opt in registered.options:
            sub.add_argument(*opt.flags, dest=opt.dest, default=None, **{k: v for k, v in opt.kwargs.items() if k != "dest"})
    return parser

async def dispatch(args: argparse.Namespace) -> int:
    registered = app.commands[args.command]
    overrides = {opt.dest: getattr(args, opt.dest) for opt in registered.options if getattr(args, opt.dest) is not None}
    if isinstance(overrides.get("series"), str):
        overrides["series"] = await load_series_coefficients(overrides["series"])
    if args.seed is not None:
        overrides["seed"] = args.seed
    data = {"command": registered.name.value}
    if args.config:
        data.update(await load_mapping(args.config))
        if data.get("command") != registered.name.value:
            raise ConfigError(f"{args.config}: configuration is for '{data.get('command')}', not '{registered.name.value}'")
    data.update(overrides)
    config = config_from_mapping(data, args.config or "<command line>")
    logger.debug("running %s", registered.name)
    return await registered.handler(config, RunContext(args.config))

def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        logging.basicConfig(
            level=(args.log_level or get_log_level()).upper(),
            stream=sys.stderr,
            format="%(levelname)s %(name)s: %(message)s",
        )
        return anyio.run(dispatch, args)
    except Exception as exc:
        handler = app.handler_for(exc)
        if handler is None:
            raise
        return handler(exc)

if __name__ == "__main__":
    sys.exit(main())
