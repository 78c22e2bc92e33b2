"""Write the synthetic benchmark under data/synthetic and record its fixtures.

The scripted backend below stands in for a code model. Its behaviour is
chosen so every ablation has something to show:

* reverse_sum/s1 has a nested syntax error; without chunking the model also
  rewrites unrelated lines (bigger patches).
* reverse_sum/s2 has two independent syntax errors and the model fixes one
  per query, so it needs two syntax iterations.
* prime_pair/s3 is the two-input prime exercise with an ``elif p=1`` typo and
  a wrong input format.
* prime_pair/s4 is only fixed when a peer example is in the prompt.

Run ``python tools/make_synthetic.py`` after changing prompt layouts; the
fixture file is keyed by prompt digests and must be regenerated.
"""

from __future__ import annotations

import argparse
import json
import shutil
import sys
from pathlib import Path

from promptfix.assignment import Assignment, ProgramVersion, TestCase, write_assignment
from promptfix.bench import MODES, load_dataset, replay
from promptfix.bench import ablation_variants
from promptfix.llm import Generation, RecordingBackend, RuleBackend
from promptfix.pipeline import PipelineConfig
from promptfix.prompts import DESCRIPTION, DIAGNOSTICS, SEMANTIC, TESTS

ROOT = Path(__file__).resolve().parents[1]
DEFAULT_OUT = ROOT / "data" / "synthetic"

# -- reverse_sum -------------------------------------------------------------

REVERSE_DESCRIPTION = (
    "Write a program to read a number (int) from the user. Print the number in reverse. "
    "Also print the sum of the number and its reverse in a separate line. See the examples.\n"
    "NOTE: Do not print any prompt in the input().\n"
)
REVERSE_TESTS = [
    TestCase("43\n", "Reverse: 34\nSum: 77"),
    TestCase("500\n", "Reverse: 5\nSum: 505"),
    TestCase("120\n", "Reverse: 21\nSum: 141"),
    TestCase("7\n", "Reverse: 7\nSum: 14"),
]
REVERSE_REFERENCE = """\
n = int(input())
r = int(str(n)[::-1])
print("Reverse: {}".format(r))
print("Sum: {}".format(n + r))
"""

S1_BUGGY = """\
num = int(input())
rev = 0
n = num
while n > 0:
    d = n % 10
    rev = rev * 10 + d
    n = n / 10
    if n == 0
        break
print("Reverse:", rev)
print("Sum:", num + rev)
"""
S1_CORRECT = S1_BUGGY.replace("n = n / 10", "n = n // 10").replace("if n == 0\n", "if n == 0:\n")
S1_EARLY = """\
num = int(input())
rev = 0
while num > 0
    rev = rev * 10 + num % 10
"""

S2_BUGGY = """\
n = int(input())
r = 0
m = n
while m > 0
    r = r * 10 + m % 10
    m //= 10
print("Reverse:", r)
if n >= 0
    print("Sum:", n + r)
"""
S2_CORRECT = S2_BUGGY.replace("while m > 0\n", "while m > 0:\n").replace("if n >= 0\n", "if n >= 0:\n")

# a peer whose first attempt forgot the sum line
S7_V0 = """\
n = int(input())
print("Reverse:", int(str(n)[::-1]))
"""
S7_V1 = """\
n = int(input())
print("Reverse:", int(str(n)[::-1]))
print("Sum:", n + int(str(n)[::-1]))
"""

# -- prime_pair --------------------------------------------------------------

PRIME_DESCRIPTION = (
    "Read two integers a and b given on one line, separated by a comma. "
    "Reverse the digits of each number to obtain x and y.\n"
    "If both x and y are prime, print x+y. Otherwise, if at least one of them is prime, "
    "print a+b. Otherwise print a*b.\n"
)
PRIME_TESTS = [
    TestCase("13,17\n", "102"),
    TestCase("12,14\n", "26"),
    TestCase("4,6\n", "24"),
    TestCase("11,40\n", "51"),
]
PRIME_REFERENCE = """\
a, b = map(int, input().split(','))
def is_prime(v):
    if v < 2:
        return False
    return all(v % d for d in range(2, int(v ** 0.5) + 1))
x = int(str(a)[::-1])
y = int(str(b)[::-1])
if is_prime(x) and is_prime(y):
    print(x + y)
elif is_prime(x) or is_prime(y):
    print(a + b)
else:
    print(a * b)
"""

# a two-input prime exercise as a student wrote it, with indentation made consistent
S3_BUGGY = """\
a=int(input())
b=int(input())
n=str(a)
m=str(b)
n1=n[::-1]
m1=m[::-1]
x=int(n1)
y=int(m1)
if x>1:
  for i in range(2, x):
    if (x%i)==0:
      p=0
      break
    else:
      p=1
else:
  p=0
if y>1:
  for j in range(2, y):
    if (y%j)==0:
      q=0
      break
    else:
      q=1
else:
  q=0
if p==1 and q==1:
  g=x+y
  print(g)
elif p=1 or q=1:
  h=a+b
  print(h)
else:
  print(a*b)
"""
S3_INPUT_FIX = "a,b = map(int, input().split(','))\n"
S3_CORRECT = S3_INPUT_FIX + S3_BUGGY.split("\n", 2)[2].replace("elif p=1 or q=1:", "elif p==1 or q==1:")
S3_EARLY = S3_BUGGY.replace("if x>1:", "if x>1").split("if y>1:")[0]
# the larger refactoring the model offers when it sees tests but no description
S3_REFACTORED = """\
a,b = map(int, input().split(','))
n=str(a)
m=str(b)
n1=n[::-1]
m1=m[::-1]
x=int(n1)
y=int(m1)
def prime(z):
  if z>1:
    for i in range(2,z):
      if (z%i)==0:
        return 0
    return 1
  else:
    return 0
p=prime(x)
q=prime(y)
if p==1 and q==1:
  g=x+y
  print(g)
elif p==1 or q==1:
  h=a+b
  print(h)
else:
  print(a*b)
"""

S4_BUGGY = """\
a,b = input().split(",")
x = int(a[::-1])
y = int(b[::-1])
def prime(z):
    if z < 2:
        return False
    for i in range(2, z):
        if z % i == 0:
            return False
    return True
if prime(x) and prime(y):
    print(x + y)
elif prime(x) or prime(y)
    print(a + b)
else:
    print(a * b)
"""
S4_SYNTAX_FIXED = S4_BUGGY.replace("elif prime(x) or prime(y)\n", "elif prime(x) or prime(y):\n")
S4_CORRECT = S4_SYNTAX_FIXED.replace("print(a + b)", "print(int(a) + int(b))").replace(
    "print(a * b)", "print(int(a) * int(b))"
)

# peer with the same string-arithmetic mistake: v0 fails exactly like s4
S5_V0 = """\
s = input().split(",")
a, b = s[0], s[1]
x = int(a[::-1])
y = int(b[::-1])
def isp(k):
    return k > 1 and all(k % d for d in range(2, k))
if isp(x) and isp(y):
    print(x + y)
elif isp(x) or isp(y):
    print(a + b)
else:
    print(a * b)
"""
S5_V1 = S5_V0.replace("print(a + b)", "print(int(a) + int(b))").replace("print(a * b)", "print(int(a) * int(b))")

# peer whose history starts with a syntax error, then fails, then passes
S6_V0 = "a, b = map(int, input().split(','))\nprint(a + b\n"
S6_V1 = "a, b = map(int, input().split(','))\nprint(a + b)\n"
S6_V2 = PRIME_REFERENCE


def assignments() -> list[tuple[Assignment, list[dict]]]:
    reverse = Assignment(
        id="reverse_sum",
        description=REVERSE_DESCRIPTION,
        tests=tuple(REVERSE_TESTS),
        reference_solution=REVERSE_REFERENCE,
        histories={
            "s1": (ProgramVersion(S1_EARLY, 0), ProgramVersion(S1_BUGGY, 1), ProgramVersion(S1_CORRECT, 2)),
            "s2": (ProgramVersion(S2_BUGGY, 0), ProgramVersion(S2_CORRECT, 1)),
            "s7": (ProgramVersion(S7_V0, 0), ProgramVersion(S7_V1, 1)),
        },
    )
    prime = Assignment(
        id="prime_pair",
        description=PRIME_DESCRIPTION,
        tests=tuple(PRIME_TESTS),
        reference_solution=PRIME_REFERENCE,
        histories={
            "s3": (ProgramVersion(S3_EARLY, 0), ProgramVersion(S3_BUGGY, 1), ProgramVersion(S3_CORRECT, 2)),
            "s4": (ProgramVersion(S4_BUGGY, 0), ProgramVersion(S4_CORRECT, 1)),
            "s5": (ProgramVersion(S5_V0, 0), ProgramVersion(S5_V1, 1)),
            "s6": (ProgramVersion(S6_V0, 0), ProgramVersion(S6_V1, 1), ProgramVersion(S6_V2, 2)),
        },
    )
    targets = [
        {"assignment": "reverse_sum", "student": "s1", "buggy": "history/s1/v01.py", "correct": "history/s1/v02.py"},
        {"assignment": "reverse_sum", "student": "s2", "buggy": "history/s2/v00.py", "correct": "history/s2/v01.py"},
        {"assignment": "prime_pair", "student": "s3", "buggy": "history/s3/v01.py", "correct": "history/s3/v02.py"},
        {"assignment": "prime_pair", "student": "s4", "buggy": "history/s4/v00.py", "correct": "history/s4/v01.py"},
    ]
    return [(reverse, targets[:2]), (prime, targets[2:])]


# -- scripted model ----------------------------------------------------------


def _syntax_chunk(text: str) -> str:
    body = text.split("# Buggy Program #\n", 1)[1]
    return body.split("\n\n### Correct Program ###", 1)[0]


def _semantic_program(text: str) -> str:
    body = text.split("### Buggy Program ###\n", 1)[1]
    return body.split("\n\n", 1)[0] + "\n"


def _g(text: str, lp: float) -> Generation:
    return Generation(text, lp)


def syntax_rule(prompt):
    if prompt.kind == SEMANTIC:
        return None
    chunk = _syntax_chunk(prompt.text)
    with_msg = DIAGNOSTICS in prompt.structure
    # s1: nested missing colon; whole-program prompts invite unrelated rewrites
    if "    if n == 0\n" in chunk:
        fixed = chunk.replace("    if n == 0\n", "    if n == 0:\n")
        if "num = int(input())" in chunk:
            fixed = (
                fixed.replace("num", "number")
                .replace('print("Reverse:", rev)', 'print("Reverse: " + str(rev))')
                .replace('print("Sum:", number + rev)', 'print("Sum: " + str(number + rev))')
            )
        return [_g(fixed, -0.21), _g(chunk, -0.35)] if with_msg else [_g(chunk, -0.30)]
    # s2: one colon per query
    if "while m > 0\n" in chunk:
        return [_g(chunk.replace("while m > 0\n", "while m > 0:\n"), -0.18)]
    if "if n >= 0\n" in chunk and "m //= 10" in chunk:
        return [_g(chunk.replace("if n >= 0\n", "if n >= 0:\n"), -0.16)]
    # s3: assignment used as comparison
    if "elif p=1 or q=1:" in chunk:
        out = [_g(chunk.replace("elif p=1 or q=1:", "elif p==1 or q==1:"), -0.12)]
        if with_msg:
            out.append(_g(chunk.replace("elif p=1 or q=1:", "elif p==1 or q=1:"), -0.40))
        return out
    # s4: missing colon on elif
    if "elif prime(x) or prime(y)\n" in chunk:
        return [_g(chunk.replace("elif prime(x) or prime(y)\n", "elif prime(x) or prime(y):\n"), -0.10)]
    return []


def semantic_rule(prompt):
    if prompt.kind != SEMANTIC:
        return None
    program = _semantic_program(prompt.text)
    blocks = set(prompt.structure)
    if "n = n / 10" in program:
        out = []
        if DIAGNOSTICS in blocks:
            out.append(_g(program.replace("n = n / 10", "n = n // 10"), -0.20))
        if TESTS in blocks:
            out.append(_g(program.replace("n = n / 10", "n = int(n / 10)"), -0.33))
        out.append(_g(program, -0.50))
        return out
    if "b=int(input())" in program and "elif p==1 or q==1:" in program:
        out = []
        if DESCRIPTION in blocks:
            out.append(_g(S3_INPUT_FIX + program.split("\n", 2)[2], -0.25))
        if TESTS in blocks:
            out.append(_g(S3_REFACTORED, -0.31))
        out.append(_g("a,b = map(int, input().split(','))\nprint(a+b\n", -0.60))
        return out
    if "print(a + b)" in program and "def prime(z):" in program:
        if prompt.shots:
            return [_g(program.replace("print(a + b)", "print(int(a) + int(b))").replace(
                "print(a * b)", "print(int(a) * int(b))"), -0.28)]
        return [_g(program.replace("print(a + b)", "print(a + b, end='')"), -0.45)]
    return []


def scripted_backend() -> RuleBackend:
    return RuleBackend([syntax_rule, semantic_rule])


def write_dataset(out: Path) -> Path:
    if out.exists():
        shutil.rmtree(out)
    out.mkdir(parents=True)
    targets = []
    for assignment, ts in assignments():
        write_assignment(assignment, out / assignment.id)
        targets += ts
    (out / "manifest.json").write_text(json.dumps({"targets": targets}, indent=2) + "\n", encoding="utf-8")
    return out


def record_fixtures(dataset_dir: Path, fixtures_path: Path) -> Path:
    """Replay every configuration the tests and docs use, recording all prompts."""
    dataset = load_dataset(dataset_dir)
    recorder = RecordingBackend(scripted_backend())
    base = PipelineConfig(workers=1)
    configs = [base]
    for mode in MODES:
        configs += [cfg for _, cfg in ablation_variants(mode, base)]
    for cfg in configs:
        replay(dataset, cfg, recorder, strict=True)
    recorder.save(fixtures_path)
    return fixtures_path


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    parser.add_argument("--out", type=Path, default=DEFAULT_OUT)
    args = parser.parse_args(argv)
    write_dataset(args.out)
    path = record_fixtures(args.out, args.out / "fixtures.json")
    print(f"wrote {args.out} and {path}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
