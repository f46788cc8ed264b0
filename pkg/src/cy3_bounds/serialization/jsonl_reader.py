import logging
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterator

import jsonlines

from cy3_bounds.entities import DomainError, ErrorRecord
from cy3_bounds.serialization.json_codec import parse_forms_instance
from cy3_bounds.services.flops.flops import FormsState

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FormsRecord:
    line: int
    state: FormsState
    record_id: str | int | None = None


def _numbered_lines(fp: IO[str], position: list[int]) -> Iterator[str]:
    for number, line in enumerate(fp, 1):
        if not line.strip():
            continue
        position[0] = number
        yield line


def read_records(fp: IO[str]) -> Iterator[FormsRecord | ErrorRecord]:
    """
    Streams forms instances from JSONL text, one record per non-blank line.
    Unparseable lines become ErrorRecords carrying their line number.
    """
    position = [0]
    reader = jsonlines.Reader(_numbered_lines(fp, position))
    while True:
        try:
            data = reader.read()
        except EOFError:
            return
        except jsonlines.InvalidLineError as e:
            logger.warning(f"line {position[0]}: {e}")
            yield ErrorRecord(line=position[0], error="InvalidLineError", message=str(e))
            continue
        try:
            state = parse_forms_instance(data)
        except DomainError as e:
            logger.warning(f"line {position[0]}: {e}")
            yield ErrorRecord(line=position[0], error=type(e).__name__, message=str(e))
            continue
        record_id = data.get("id") if isinstance(data, dict) else None
        yield FormsRecord(position[0], state, record_id)


def ingest_jsonl(path: Path | str) -> Iterator[FormsRecord | ErrorRecord]:
    with open(path, encoding="utf-8") as fp:
        yield from read_records(fp)
