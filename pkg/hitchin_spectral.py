"""
hitchin_spectral.py
-----------------
Entry point for the Hitchin-pair / spectral-sheaf toolkit.
See scripts/cli.py for the commands (gen, analyze, verify, suite).
"""

import sys
from pathlib import Path

# Add repo root to Python path so `scripts` resolves as a package
BASE_DIR = Path(__file__).resolve().parent
sys.path.append(str(BASE_DIR))

from scripts.cli import main  # noqa: E402

# ================================
# Entry Point
# ================================
if __name__ == "__main__":
    sys.exit(main())
