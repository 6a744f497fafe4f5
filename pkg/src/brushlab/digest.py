import hashlib
from typing import Iterable, Union


def blob_hash(content: Union[str, bytes]) -> str:
    """Returns the git object id of a blob with the given content:
    sha1("blob <size>\\0" + content)."""
    if isinstance(content, str):
        content = content.encode()
    header = b"blob %d\x00" % len(content)
    return hashlib.sha1(header + content).hexdigest()


def input_hash(contents: Iterable[Union[str, bytes]]) -> str:
    """Hash of several inputs, each hashed as a blob, combined in order."""
    combined = "\n".join(blob_hash(c) for c in contents)
    return blob_hash(combined)
