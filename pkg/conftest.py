import sys
from pathlib import Path

# Allow running pytest without installing the package first.
_SRC = str(Path(__file__).parent / "src")
if _SRC not in sys.path:
    sys.path.insert(0, _SRC)
