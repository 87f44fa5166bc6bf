import argparse
import logging
import sys
from typing import List, Optional, Sequence

from api.parser import parse
from api.runner import FORMATS, CommandResult, Runner
from api.workspace import Workspace, resolve
from config import Config
from core.errors import RegulusError, ResolutionError


class Regulus:
    def __init__(self, config_path: Optional[str] = None, max_enum: Optional[int] = None,
                 verbose: bool = False):
        """
        Main application class for Regulus

        Args:
            config_path: Path to JSON configuration file
            max_enum: enumeration budget, overriding the configuration
            verbose: log at DEBUG regardless of the configured level
        """
        self.config = Config(config_path)
        settings = self.config.get_enumeration_settings()
        self.max_enum = max_enum if max_enum is not None else settings['max_enum']
        self.show_progress = settings['show_progress']
        level = 'DEBUG' if verbose else self.config.get_logging_settings()['log_level']
        logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                            format='%(levelname)s %(name)s: %(message)s')
        self.workspace: Optional[Workspace] = None
        self.runner: Optional[Runner] = None

    def load(self, path: str) -> None:
        """Parse and resolve a program file"""
        with open(path, encoding='utf-8') as f:
            program = parse(f.read())
        self.workspace = resolve(program, self.max_enum)
        self.runner = Runner(self.workspace, self.max_enum, self.show_progress)

    def run_command(self, command: str, args: Sequence[str], model: Optional[str] = None,
                    fmt: str = 'text') -> int:
        result: CommandResult = self.runner.run(command, args, model, fmt)
        print(result.output)
        return result.exit_code

    def run_queries(self) -> int:
        """Run the file's query statements in order; the worst exit code wins"""
        worst = 0
        for query in self.workspace.queries:
            options = build_query_parser().parse_intermixed_args(list(query.args))
            print(f"# {' '.join(query.args)}")
            worst = max(worst, self.run_command(options.command, options.args,
                                                options.model, options.format))
        return worst


class QueryArgumentParser(argparse.ArgumentParser):
    """Reports bad query statements as resolution errors instead of exiting"""

    def error(self, message):
        raise ResolutionError(f"query: {message}")


def build_query_parser() -> argparse.ArgumentParser:
    parser = QueryArgumentParser(prog="query", add_help=False)
    parser.add_argument('command')
    parser.add_argument('args', nargs='*')
    parser.add_argument('--model', default=None)
    parser.add_argument('--format', choices=FORMATS, default='text')
    return parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='regulus',
                                     description='Regular logic with wiring diagrams')
    parser.add_argument('file', help='.rlog program')
    parser.add_argument('command', nargs='?', help='command to run; default runs the file queries')
    parser.add_argument('args', nargs='*', help='command arguments')
    parser.add_argument('--model', default=None, help='model used by eval, entail and syncat commands')
    parser.add_argument('--format', choices=FORMATS, default='text')
    parser.add_argument('--max-enum', type=int, default=None, help='enumeration budget')
    parser.add_argument('--config', default=None, help='JSON configuration file')
    parser.add_argument('--verbose', action='store_true')
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    options = build_parser().parse_intermixed_args(argv)
    try:
        app = Regulus(options.config, options.max_enum, options.verbose)
        app.load(options.file)
        if options.command is None:
            return app.run_queries()
        return app.run_command(options.command, options.args, options.model, options.format)
    except (RegulusError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
