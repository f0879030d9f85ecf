#!/usr/bin/env python3
"""
MTSS Toolkit - Command Line Entry Point

Run this file to use the toolkit from a shell:
    python main.py validate scene.mtss.json
"""

import sys
import os

# Add src to path for imports
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from src.cli import main

if __name__ == "__main__":
    sys.exit(main())
