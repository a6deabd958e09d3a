#!/usr/bin/env python3
# Copyright 2026 The sotif_kitti Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Regenerates the evaluation fixture and golden files in a scratch directory and
compares them with the checked-in copies. Exits 77 when shapely is unavailable."""

import filecmp
import sys
import tempfile
from pathlib import Path

try:
    import shapely  # noqa: F401
except ImportError:
    sys.exit(77)

HERE = Path(__file__).resolve().parent
sys.path.insert(0, str(HERE))

import make_eval_fixture  # noqa: E402
import reference_eval  # noqa: E402


def tree_files(root):
    return sorted(p.relative_to(root) for p in root.rglob("*") if p.is_file())


def main():
    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        make_eval_fixture.main(tmp / "eval")
        reference_eval.main(tmp / "eval", tmp / "golden")
        mismatches = []
        for fresh_root, kept_root in ((tmp / "eval", HERE / "eval"),
                                      (tmp / "golden", HERE.parent / "golden")):
            fresh, kept = tree_files(fresh_root), tree_files(kept_root)
            if fresh != kept:
                mismatches.append(f"file sets differ under {kept_root}")
                continue
            for rel in fresh:
                if not filecmp.cmp(fresh_root / rel, kept_root / rel, shallow=False):
                    mismatches.append(str(kept_root / rel))
        for m in mismatches:
            print("mismatch:", m)
        return 1 if mismatches else 0


if __name__ == "__main__":
    sys.exit(main())
