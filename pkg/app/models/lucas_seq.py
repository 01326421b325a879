from dataclasses import dataclass, field
from typing import List


@dataclass
class LucasSeq:
    """Scaled Lucas sequence attached to (p, tau(p)).

    ``terms[n]`` holds u_n, with ``terms[0] = 0``. The memo grows on demand, so
    an instance has a single writer.
    """

    p: int
    r: int
    trace: int
    norm: int
    disc: int
    terms: List[int] = field(default_factory=list, repr=False)

    def __post_init__(self):
        if not self.terms:
            self.terms = [0, 1, self.trace]

    def __repr__(self):
        return f"<LucasSeq(p={self.p}, r={self.r}, trace={self.trace}, norm={self.norm})>"
