#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Release helper for the shallow water solver.

Bumps the version in the package and ``pyproject.toml``, runs the fast
test suite (and optionally the slow benchmark reproductions), moves the
``Unreleased`` changelog entries under the new version and builds the
distribution.
"""

import argparse
import re
import subprocess
import sys
from datetime import date
from pathlib import Path

INIT_FILE = Path("src/shallow_water_afc/__init__.py")
PYPROJECT = Path("pyproject.toml")
CHANGELOG = Path("CHANGELOG.md")
VERSION_RE = re.compile(r'__version__\s*=\s*["\']([^"\']+)["\']')


def get_current_version() -> str:
    """Read ``__version__`` from the package."""
    match = VERSION_RE.search(INIT_FILE.read_text(encoding="utf-8"))
    if not match:
        raise ValueError(f"{INIT_FILE} 中没有 __version__")
    return match.group(1)


def bump_version(version: str, part: str) -> str:
    """Bump one part of a ``major.minor.patch`` version."""
    major, minor, patch = map(int, version.split("."))
    if part == "major":
        return f"{major + 1}.0.0"
    if part == "minor":
        return f"{major}.{minor + 1}.0"
    if part == "patch":
        return f"{major}.{minor}.{patch + 1}"
    raise ValueError(f"无效的版本部分: {part}")


def update_version(new_version: str) -> None:
    """Write the new version to the package and pyproject.toml."""
    content = INIT_FILE.read_text(encoding="utf-8")
    INIT_FILE.write_text(
        VERSION_RE.sub(f'__version__ = "{new_version}"', content),
        encoding="utf-8",
    )
    content = PYPROJECT.read_text(encoding="utf-8")
    PYPROJECT.write_text(
        re.sub(
            r'^version\s*=\s*"[^"]+"',
            f'version = "{new_version}"',
            content,
            count=1,
            flags=re.MULTILINE,
        ),
        encoding="utf-8",
    )


def update_changelog(new_version: str) -> bool:
    """Open a dated section for ``new_version`` below ``Unreleased``."""
    content = CHANGELOG.read_text(encoding="utf-8")
    marker = "## [Unreleased]"
    if marker not in content:
        return False
    heading = f"{marker}\n\n## [{new_version}] - {date.today():%Y-%m-%d}"
    CHANGELOG.write_text(content.replace(marker, heading, 1), "utf-8")
    return True


def run_tests(slow: bool) -> bool:
    """Run the fast suite and, if requested, the reproductions."""
    print("Running tests...")
    if subprocess.run(["pytest"]).returncode != 0:
        return False
    if slow:
        print("Running benchmark reproductions...")
        return subprocess.run(["pytest", "-m", "slow"]).returncode == 0
    return True


def build_package() -> None:
    """Build distribution packages."""
    print("Building package...")
    subprocess.run([sys.executable, "-m", "build"], check=True)


def main() -> int:
    """Main release workflow."""
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("part", choices=["major", "minor", "patch"])
    parser.add_argument(
        "--slow",
        action="store_true",
        help="Also run the slow benchmark reproductions",
    )
    parser.add_argument(
        "-y", "--yes", action="store_true", help="Do not ask to confirm"
    )
    args = parser.parse_args()

    current_version = get_current_version()
    new_version = bump_version(current_version, args.part)
    print(f"Version: {current_version} -> {new_version}")

    if not args.yes:
        response = input("Continue? [y/N] ")
        if response.lower() != "y":
            print("Aborted.")
            return 0

    if not run_tests(args.slow):
        print("✗ Tests failed. Aborting release.")
        return 1
    print("✓ Tests passed")

    update_version(new_version)
    if not update_changelog(new_version):
        print("! CHANGELOG.md has no [Unreleased] section")
    print(f"✓ Updated version to {new_version}")

    build_package()
    print("✓ Package built")

    print(
        f"""
✓ Release preparation complete!

Next steps:
1. Review changes
2. Commit: git add -A && git commit -m "Release {new_version}"
3. Tag: git tag -a v{new_version} -m "Release {new_version}"
4. Push: git push && git push --tags
5. Publish to PyPI: twine upload dist/*
"""
    )
    return 0


if __name__ == "__main__":
    sys.exit(main())
