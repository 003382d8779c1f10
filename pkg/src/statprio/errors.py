"""Exception type shared by every module of the toolkit."""


class ModelError(ValueError):
    """A domain error carrying a stable machine-readable ``code``.

    Codes in use: SYNTAX, UNKNOWN_FEATURE, DUPLICATE_FEATURE, NOT_A_TREE,
    TOO_LARGE, INVALID_MODEL, INVALID_PRODUCT, NO_SUCH_PATH, INVALID_PARAMS,
    TRACE_REJECTED, INITIAL_DEAD.
    """

    def __init__(self, code: str, detail: str = ""):
        self.code = code
        self.detail = detail
        super().__init__(f"{code}: {detail}" if detail else code)
