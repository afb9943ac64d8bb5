//! Explicit SLOCC conversions: local operators that take one state to a
//! multiple of another, and the constructions built from them.

mod catalysis;
mod elimination;
mod matmul;
mod product;
mod witness;

pub use catalysis::{
    build_catalyst, catalysis_witness, ghz_power_to_w_power, simple_catalysis_witness, smlocc_w_demo, smlocc_w_demo_with_level,
    w_catalysis, w_simple_catalysis, SingleCopyObstruction, SmloccReport,
};
pub use elimination::{
    clearing_operator, elimination_source, lemma_elimination, slot_pattern_state, Elimination, EliminationStep,
    SlotPattern,
};
pub use matmul::{epr_relabel_witness, epr_triangle, matmul_tensor, matmul_threshold, strassen_certificate};
pub use product::{symmetric_to_product, ProductDecomposition, ProductTerm};
pub use witness::{direct_sum_witness, ghz_power_fusion, ghz_to_state_operators, ConversionWitness, WITNESS_TOL};
