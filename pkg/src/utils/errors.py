"""Error hierarchy shared by managers and commands.

Every error is a ``click.ClickException`` so the CLI surfaces the message and
exit code without extra handling.
"""

import click

VALIDATION_EXIT = 2
REPRODUCTION_EXIT = 3
IO_EXIT = 4


class EstlabError(click.ClickException):
    """Base class for estlab errors."""

    exit_code = VALIDATION_EXIT


class SchemaError(EstlabError):
    """A required column is missing or malformed."""


class DegenerateMomentError(EstlabError):
    """A moment needed as a divisor is zero."""


class DesignError(EstlabError):
    """Design sizes are inconsistent (n, N, n', k, L)."""


class DomainError(EstlabError):
    """A value lies outside the domain of the formula."""


class SingularInputError(EstlabError):
    """A point-estimate denominator vanished."""


class SingularFamilyError(EstlabError):
    """The factor-type family is undefined at the requested alpha."""


class IncompleteInputError(EstlabError):
    """A moment or summary field the formula needs is absent."""


class DegenerateOptimumError(EstlabError):
    """The objective has no unique minimum."""


class EnumerationTooLargeError(EstlabError):
    """Exact enumeration would exceed the configured cap."""


class UnknownIdentifierError(EstlabError):
    """Unknown dataset, table or estimator id."""


class InputOutputError(EstlabError):
    """Reading or writing a file failed."""

    exit_code = IO_EXIT


class ReproductionFailure(EstlabError):
    """A match-class cell missed its tolerance."""

    exit_code = REPRODUCTION_EXIT
