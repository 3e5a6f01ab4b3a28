#!/usr/bin/env python3
"""Rebuild data/corpus/en from two public-domain PyPI distributions.

* shakespeare==0.6 (Project Gutenberg texts of the plays and poems)
* hodgeys-kjv-db==1.0.0 (King James Bible, SQLite)

Each play/poem and each Bible book becomes one article file. The
Gutenberg texts are hard-wrapped, so every blank-line separated block is
joined onto one line; otherwise sentence splitting at line breaks would cut
most verse sentences mid-clause.
"""
import pathlib
import re
import sqlite3
import subprocess
import sys
import tarfile
import tempfile
import zipfile

ROOT = pathlib.Path(__file__).resolve().parent.parent
OUT = ROOT / "data" / "corpus" / "en" / "articles"


def reflow(text: str) -> str:
    blocks = re.split(r"\n\s*\n", text.replace("\r\n", "\n"))
    lines = (" ".join(line.strip() for line in b.splitlines() if line.strip()) for b in blocks)
    return "\n".join(line for line in lines if line) + "\n"


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    with tempfile.TemporaryDirectory() as tmp:
        tmp = pathlib.Path(tmp)
        subprocess.check_call(
            [sys.executable, "-m", "pip", "download", "--no-deps", "-d", str(tmp),
             "shakespeare==0.6", "hodgeys-kjv-db==1.0.0"])
        with tarfile.open(tmp / "shakespeare-0.6.tar.gz") as tar:
            for member in sorted(tar.getmembers(), key=lambda m: m.name):
                name = pathlib.PurePosixPath(member.name)
                if name.parent.name == "texts" and "shksprdata" in name.parts \
                        and name.name.endswith("_gut.txt"):
                    data = tar.extractfile(member).read().decode("utf-8", "replace")
                    (OUT / f"shakespeare_{name.name[:-len('_gut.txt')]}.txt").write_text(reflow(data))
        whl = next(tmp.glob("hodgeys_kjv_db-*.whl"))
        with zipfile.ZipFile(whl) as z:
            z.extract("hodgeys_kjv_db/DATA/Bible.db", tmp)
        con = sqlite3.connect(tmp / "hodgeys_kjv_db" / "DATA" / "Bible.db")
        books = {}
        for testament, book, short in con.execute(
                "select TestamentID, BookID, ShortName from Books"):
            books[(testament, book)] = short
        current, lines = None, []

        def flush():
            if current is not None:
                t, b = current
                slug = books.get(current, f"{t}_{b}").lower().replace(" ", "_")
                (OUT / f"kjv_{t}_{b:02d}_{slug}.txt").write_text("\n".join(lines) + "\n")

        for t, b, passage in con.execute(
                "select TestamentID, BookID, Passage1 from Bible "
                "order by TestamentID, BookID, ChapterID, VerseID"):
            if (t, b) != current:
                flush()
                current, lines = (t, b), []
            text = passage.split(" ", 1)[1] if passage[:1].isdigit() else passage
            lines.append(text.strip())
        flush()


if __name__ == "__main__":
    main()
