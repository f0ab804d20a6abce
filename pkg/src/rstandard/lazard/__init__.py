"""Lie correspondence and linearity for Zp-standard groups."""
from .induced import (BlockMonomial, GroupHomCertificate, UniformEmbedding, coset_transversal,
                      uniform_embedding)
from .lie import STRATEGIES, LieLattice, MatrixRep, build_rep, faithfulness_loss, relation_failures
from .limits import (LimitResult, lazard_add, lazard_bracket, lazard_combination, lie_coordinates,
                     lie_lattice_of, p_root, standard_basis)
from .matexp import bch, mat_exp, mat_log

__all__ = [
    "BlockMonomial", "GroupHomCertificate", "UniformEmbedding", "coset_transversal",
    "uniform_embedding", "STRATEGIES", "LieLattice", "MatrixRep", "build_rep",
    "faithfulness_loss", "relation_failures", "LimitResult", "lazard_add", "lazard_bracket",
    "lazard_combination", "lie_coordinates", "lie_lattice_of", "p_root", "standard_basis",
    "bch", "mat_exp", "mat_log",
]
