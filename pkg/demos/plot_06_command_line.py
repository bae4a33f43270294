"""
Driving the lab from the command line
=====================================

Every computation is also available as ``rdlab <subcommand>``. Output is
JSON with a header that echoes the resolved configuration.
"""

# %%
import json
import subprocess
import sys


def rdlab(*args):
    p = subprocess.run([sys.executable, "-m", "rdlab", *args], capture_output=True, text=True)
    return p.returncode, p.stdout


print(rdlab("omega", "--u", "1.5"))
code, out = rdlab("l1", "--ds", "q10-x7", "--k", "5", "--reproducible")
print(code, json.dumps(json.loads(out), indent=1))

# %%
code, out = rdlab("eigen", "--j", "4", "--a0", "all", "--check")
print("exit", code)
print(out.splitlines()[-1])
