#!/usr/bin/env python3
"""
Build script for the MTSS toolkit.
Creates a standalone console executable using PyInstaller.
"""

import os
import sys
import shutil
import subprocess
from pathlib import Path
from typing import List

APP_NAME = 'mtss'
PROJECT_ROOT = Path(__file__).resolve().parent.parent


def clean_build(root: Path = PROJECT_ROOT):
    """Remove previous build artifacts."""
    for dir_name in ('build', 'dist', '__pycache__'):
        dir_path = root / dir_name
        if dir_path.exists():
            print(f"Removing {dir_path}...")
            shutil.rmtree(dir_path)

    spec_file = root / f'{APP_NAME}.spec'
    if spec_file.exists():
        spec_file.unlink()
        print(f"Removed {spec_file}")


def build_command() -> List[str]:
    """PyInstaller argument vector for the console executable."""
    return [
        sys.executable, '-m', 'PyInstaller',
        '--name', APP_NAME,
        '--console',
        '--onefile',            # Single executable
        '--clean',              # Clean PyInstaller cache
        # lark loads its grammar tooling dynamically
        '--collect-data', 'lark',
        '--hidden-import', 'scipy.optimize',
        'main.py'
    ]


def executable_path(root: Path = PROJECT_ROOT) -> Path:
    suffix = '.exe' if sys.platform == 'win32' else ''
    return root / 'dist' / f'{APP_NAME}{suffix}'


def build_executable() -> bool:
    """Build the executable using PyInstaller."""
    print("\n" + "=" * 50)
    print("Building MTSS executable")
    print("=" * 50 + "\n")

    os.chdir(PROJECT_ROOT)
    cmd = build_command()
    print(f"Running: {' '.join(cmd)}\n")

    result = subprocess.run(cmd, check=False)
    if result.returncode != 0:
        print("\nBuild failed!")
        return False

    exe_path = executable_path()
    if not exe_path.exists():
        print("\nExecutable not found!")
        return False

    size_mb = exe_path.stat().st_size / (1024 * 1024)
    print("\nBuild successful!")
    print(f"   Executable: {exe_path}")
    print(f"   Size: {size_mb:.1f} MB")
    return True


def main():
    """Main entry point."""
    import argparse

    parser = argparse.ArgumentParser(description='Build the mtss executable')
    parser.add_argument('--clean', action='store_true', help='Clean build artifacts only')
    parser.add_argument('--no-clean', action='store_true', help='Skip cleaning before build')

    args = parser.parse_args()

    if args.clean:
        clean_build()
        print("\nClean complete!")
        return

    if not args.no_clean:
        clean_build()

    success = build_executable()
    sys.exit(0 if success else 1)


if __name__ == '__main__':
    main()
