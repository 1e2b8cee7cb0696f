"""
Bundled scenario files.

The network and line tables of the reference setups ship here as JSON so
that library code never hard-codes them:

- ``scenario1.json``: four DGUs in a ring with ZIP loads and a P-load step;
- ``scenario2.json``: the same ring with pure P-loads;
- ``illustrative.json`` and ``illustrative_case2.json``: one DGU with a
  ZIP load whose equivalent conductance at the reference is positive and
  negative, respectively;
- ``cpl_witness.json``: one DGU with a large pure P-load under the
  comparison controller.

Use `zipgrid.io.bundled_scenario` to locate them.
"""
import glob
import os

rootdir = os.path.dirname(os.path.abspath(__file__))
file_list = sorted(glob.glob(os.path.join(rootdir, '*.json')))
