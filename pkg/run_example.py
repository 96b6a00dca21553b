#!/usr/bin/env python
"""
Script to run one of the bundled experiment configs.
"""

import sys
import argparse
from pathlib import Path

CONFIG_DIR = Path(__file__).parent / "configs"


def list_examples():
    """List all bundled configs."""
    return sorted(f.stem for f in CONFIG_DIR.glob("*.json"))


def run_example(name, episodes=None, seed=None, out=None):
    """
    Run a bundled config through the CLI.

    Args:
        name: Config name without extension
        episodes: Optional episode count replacing the config's
        seed: Optional single seed
        out: Optional output directory
    """
    config_path = CONFIG_DIR / f"{name}.json"
    if not config_path.exists():
        print(f"Error: Example '{name}' not found.")
        print("Available examples:")
        for example in list_examples():
            print(f"  - {example}")
        return 1

    sys.path.append(str(Path(__file__).parent))
    from src.cli import main
    from src.config.config_manager import ConfigManager

    argv = ["run", "--config", str(config_path)]
    if episodes is not None:
        config = ConfigManager.load_from_file(config_path).model_copy(update={"episodes": episodes})
        target = Path(out or config.output_dir)
        target.mkdir(parents=True, exist_ok=True)
        trimmed = target / f"{name}.json"
        ConfigManager().save_config(trimmed, config)
        argv = ["run", "--config", str(trimmed)]
    if seed is not None:
        argv += ["--seed-override", str(seed)]
    if out is not None:
        argv += ["--out", out]

    print(f"Running example: {name}")
    print("-" * 80)
    return main(argv)


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description="Run a bundled experiment config")
    parser.add_argument("example", nargs="?", help="Name of the config to run")
    parser.add_argument("--list", "-l", action="store_true", help="List all bundled configs")
    parser.add_argument("--episodes", type=int, help="Override the episode count")
    parser.add_argument("--seed", type=int, help="Run one seed only")
    parser.add_argument("--out", help="Output directory")
    args = parser.parse_args()

    if args.list or not args.example:
        print("Available examples:")
        for example in list_examples():
            print(f"  - {example}")
        sys.exit(0 if args.list else 1)

    sys.exit(run_example(args.example, args.episodes, args.seed, args.out))
