"""Domain errors raised across the package.

Everything inherits from RecourseKitError so callers (and the CLI) can
catch domain failures in one place and map them to exit code 1.
"""


class RecourseKitError(Exception):
    """Base class for all domain errors."""


# -- dataset ---------------------------------------------------------------

class DatasetError(RecourseKitError):
    pass


class MissingIdColumn(DatasetError):
    def __init__(self):
        super().__init__("CSV has no 'id' column")


class NonNumericCell(DatasetError):
    def __init__(self, row: int, column: str):
        self.row = row
        self.column = column
        super().__init__(f"non-numeric cell at line {row}, column {column!r}")


class ConstantColumn(DatasetError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"column {name!r} is constant; degenerate range rejected")


class DuplicateId(DatasetError):
    def __init__(self, subject_id: str):
        self.subject_id = subject_id
        super().__init__(f"duplicate subject id {subject_id!r}")


class OutOfRange(DatasetError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"normalized value for {name!r} outside [0, 1]")


# -- model -----------------------------------------------------------------

class ModelError(RecourseKitError):
    pass


class NoLabels(ModelError):
    def __init__(self):
        super().__init__("training requires a label on every record")


class SingleClassData(ModelError):
    def __init__(self):
        super().__init__("training requires at least one record of each class")


class SchemaMismatch(ModelError):
    def __init__(self, detail: str = ""):
        super().__init__(f"record does not conform to model schema{': ' + detail if detail else ''}")


# -- attribution -----------------------------------------------------------

class AttributionError(RecourseKitError):
    pass


class TooManyFeatures(AttributionError):
    def __init__(self, count: int, limit: int):
        self.count = count
        self.limit = limit
        super().__init__(f"exact enumeration supports at most {limit} features, got {count}")


class EmptyBackground(AttributionError):
    def __init__(self):
        super().__init__("background set is empty")


class UnknownFeature(AttributionError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"unknown feature {name!r}")


class UngroupedVector(AttributionError):
    def __init__(self):
        super().__init__("attribution vector has no displayed-feature grouping")


# -- recourse --------------------------------------------------------------

class RecourseOpError(RecourseKitError):
    pass


class SameSubject(RecourseOpError):
    def __init__(self, subject_id: str):
        self.subject_id = subject_id
        super().__init__(f"candidate and current state are the same subject {subject_id!r}")


class NotACandidate(RecourseOpError):
    def __init__(self, subject_id: str):
        self.subject_id = subject_id
        super().__init__(f"subject {subject_id!r} is not in the current candidate list")


class EmptyPath(RecourseOpError):
    def __init__(self):
        super().__init__("path has no states (no start selected)")


class UnknownSubject(RecourseOpError):
    def __init__(self, subject_id: str):
        self.subject_id = subject_id
        super().__init__(f"unknown subject id {subject_id!r}")
