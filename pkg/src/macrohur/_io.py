"""Float formatting and all-or-nothing file output."""

import os
import tempfile


def fmt(x) -> str:
    """17 significant digits in scientific notation."""
    return f"{float(x):.16e}"


def write_atomic(outputs: dict, directory) -> list:
    """Write every ``{filename: text}`` entry, or none of them.

    Each file goes to a temporary name in ``directory`` first.  The renames
    happen only after every temporary file is written.
    """
    os.makedirs(directory, exist_ok=True)
    staged = []
    try:
        for name, text in outputs.items():
            fd, tmp = tempfile.mkstemp(prefix=f".{name}.", dir=directory)
            staged.append((tmp, os.path.join(directory, name)))
            with os.fdopen(fd, "w", newline="\n") as fh:
                fh.write(text)
    except BaseException:
        for tmp, _ in staged:
            os.unlink(tmp)
        raise
    for tmp, final in staged:
        os.replace(tmp, final)
    return [final for _, final in staged]
