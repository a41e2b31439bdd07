"""Exception types shared across the package."""


class QmlabError(Exception):
    """Base class for qmlab-specific failures."""


class UnsupportedBankError(QmlabError):
    """The operation is not defined for this bank's branching factor or shape."""


class ResourceCapError(QmlabError):
    """A configured size cap (grid size, word depth) would be exceeded."""


class HorizonError(QmlabError):
    """A tiling interval crosses the coverage horizon; enlarge the horizon."""


class SingularResolventError(QmlabError):
    """The shifted block (a - G) is numerically singular, so no separated
    eigenvector can be produced for this eigenvalue."""
