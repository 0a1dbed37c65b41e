"""Exceptions raised by nccell"""


class NCCellError(Exception):
    """Base class for all nccell errors"""


class PresentationError(NCCellError, ValueError):
    """A presentation (or expression) failed to parse or validate

    Parameters
    ----------
    message : string
        short description of the failure
    diagnostics : list of Diagnostic, optional
        validation diagnostics, each carrying an expression path
    line, column : int, optional
        1-based source position for syntax errors
    """
    def __init__(self, message, diagnostics=(), line=None, column=None):
        super(PresentationError, self).__init__(message)
        self.message = message
        self.diagnostics = list(diagnostics)
        self.line = line
        self.column = column

    def __str__(self):
        lines = [self.message]
        if self.line is not None:
            lines[0] = "{} (line {}, column {})".format(self.message,
                                                       self.line, self.column)
        lines.extend("    {}".format(diag) for diag in self.diagnostics)
        return '\n'.join(lines)


class RewriteOrderError(NCCellError, ValueError):
    """A rewrite rule does not decrease the word order"""


class SubstitutionError(NCCellError, ValueError):
    """A generator image is missing or has an inconsistent block shape"""


class RelationError(NCCellError, ValueError):
    """Input matrices do not satisfy the relations a construction needs"""


class NumericalModelError(NCCellError, ArithmeticError):
    """A residual or drift exceeded the level that signals a broken model"""


class GridResolutionError(NCCellError, ArithmeticError):
    """A sampled loop is too coarse for its winding number"""
