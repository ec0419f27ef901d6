"""stepmark: a rule-based marker for step-by-step algebra working.

Grades each submitted line against a knowledge base of correct and known-buggy
transformation rules, credits method separately from arithmetic, and keeps
giving method credit after an earlier slip (follow-through marking) instead of
only checking the final answer.
"""

__version__ = "0.1.0"
