"""Repair introductory Python programs with ensembled prompts and interpreter oracles."""

from .assignment import Assignment, ProgramVersion, TestCase, load_assignment, validate, write_assignment
from .chunker import Chunk, chunk, merge_chunk
from .fewshot import BankEntry, build_bank, select_shots, similarity
from .llm import GenParams, Generation, HttpBackend, HttpConfig, MockBackend, extract_code, top_k_by_logprob
from .oracles import Diagnostic, TestReport, TestVector, check_syntax, normalize, run_tests
from .pipeline import Candidate, PipelineConfig, RepairResult, repair, select_final
from .prompts import ExamplePair, Prompt, semantic_prompts, syntax_prompts
from .tokens import token_edit_distance, tokenize

__version__ = "0.1.0"
