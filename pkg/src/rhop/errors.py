"""Error type shared by all rhop modules."""


class RhopError(Exception):
    """Numerical or domain failure in a rhop operation.

    Carries the originating module name and, when an operation can hand back
    the part of the result it did compute (e.g. recurrence coefficients up to
    the degree where positivity was lost), a ``partial`` payload.
    """

    def __init__(self, message, module="rhop", partial=None):
        super().__init__(message)
        self.module = module
        self.partial = partial

    def to_json_dict(self, code=3):
        return {"code": code, "module": self.module, "message": str(self)}
