import csv
from pathlib import Path
from typing import Any, Dict, Iterable, List, Type, TypeVar

from pydantic import BaseModel

_RowType = TypeVar("_RowType", bound=BaseModel)

DataObject = Dict[str, Any]


def _cell(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


class CsvInterface:
    """Reads and writes one CSV file whose columns are the fields of `row_class`."""

    def __init__(self, row_class: Type[_RowType]):
        self.row_class = row_class
        self.columns = list(row_class.model_fields)

    def write(self, path: Path | str, rows: Iterable[_RowType | DataObject]) -> int:
        """
        Validates every row through the row model and writes the file.
        Returns the number of rows written.
        """
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        count = 0
        with path.open("w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(self.columns)
            for row in rows:
                item = row if isinstance(row, self.row_class) else self.row_class.model_validate(row)
                writer.writerow([_cell(getattr(item, name)) for name in self.columns])
                count += 1
        return count

    def read(self, path: Path | str) -> List[_RowType]:
        with Path(path).open(newline="", encoding="utf-8") as handle:
            reader = csv.DictReader(handle)
            return [self.row_class.model_validate(record) for record in reader]
