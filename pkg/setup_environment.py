#!/usr/bin/env python
"""
Script to set up a working copy of the architecture-search engine.
"""

import os
import sys
import argparse
import shutil
import subprocess
from pathlib import Path


def create_directories():
    """Create the output and log directories."""
    for directory in ("./runs", "./logs"):
        os.makedirs(directory, exist_ok=True)
        print(f"Created directory: {directory}")


def install_dependencies(editable=False):
    """Install dependencies from requirements.txt, optionally the package itself."""
    if not Path("requirements.txt").exists():
        print("Error: requirements.txt not found.")
        return False

    command = [sys.executable, "-m", "pip", "install", "-r", "requirements.txt"]
    if editable:
        command += ["-e", "."]
    print(f"Running: {' '.join(command)}")
    try:
        subprocess.check_call(command)
        print("Dependencies installed successfully.")
        return True
    except subprocess.CalledProcessError as e:
        print(f"Error installing dependencies: {e}")
        return False


def setup_env_file():
    """Create .env from .env.example unless one exists."""
    if Path(".env").exists():
        print(".env already exists. Skipping.")
        return
    if not Path(".env.example").exists():
        print("Error: .env.example not found.")
        return
    shutil.copyfile(".env.example", ".env")
    print("Created .env from .env.example.")


def main():
    """Main entry point for the script."""
    parser = argparse.ArgumentParser(description="Set up the architecture-search engine")
    parser.add_argument("--editable", "-e", action="store_true", help="Also install the package in editable mode")
    parser.add_argument("--skip-install", action="store_true", help="Do not call pip")
    args = parser.parse_args()

    create_directories()
    if not args.skip_install:
        install_dependencies(args.editable)
    setup_env_file()

    print("\nSetup complete. Next steps:")
    print("1. Check a config:  python -m src.cli validate-config -c configs/vqsd_2q.json")
    print("2. Run an example:  python run_example.py vqe_heisenberg_2 --episodes 20")
    print("3. Run the tests:   python run_tests.py")


if __name__ == "__main__":
    main()
