#pragma once

#include <cstddef>
#include <optional>
#include <variant>
#include <vector>

#include <json.hpp>

#include "banach/algebra.hpp"
#include "banach/matrices.hpp"
#include "banach/topology.hpp"

namespace banach {

struct ReduceOptions {
  std::optional<double> eps;  ///< zero-set threshold; default_eps(g) when unset
  std::optional<double> tol;  ///< invertibility threshold; default_tol((f, g)) when unset
};

/// f + a g is an invertible tuple.
struct ReductionWitness {
  Tuple a;
  double achieved_min = 0.0;  ///< min over the spectrum of |f + a g|
  double eps = 0.0;
  nlohmann::ordered_json extension_trace;
};

/// e_1 · exp(L_1) ··· exp(L_k) = f + a g; for n = 1 also e^h = f + a g.
struct PrincipalWitness {
  Tuple a;
  ExpProduct E;
  std::optional<Element> h;
  double eps = 0.0;
};

/// u · W = e_1 with W = exp(L_1) ··· exp(L_k) of determinant one.
struct RowExtension {
  ExpProduct W;
  Matrix matrix;  ///< W assembled directly from its elementary factors
  double row_residual = 0.0;  ///< sup |u W - e_1|
  double det_residual = 0.0;  ///< sup |det W - 1|
  double inverse_row_residual = 0.0;  ///< sup |first row of W^-1 - u|
  double product_residual = 0.0;  ///< sup |∏ exp(L_j) - W|
};

/// Σ e^{x_j} (a_j + b_j g) = 1.
struct ExpReducibilityWitness {
  Tuple x;
  Tuple b;
};

/// Links f to target t in the g-relation: f + g x = t · ∏ exp(L_j).
struct EquivalenceWitness {
  Tuple x;
  ExpProduct E;
};

using Reduction = std::variant<ReductionWitness, ObstructionReport>;
using Principal = std::variant<PrincipalWitness, ObstructionReport>;

/// x_j = conj(f_j) / |f|², so Σ x_j f_j = 1. Throws NotInvertibleTuple.
Tuple bezout(const Tuple& f, std::optional<double> tol = std::nullopt);

struct ZeroFreeExtension {
  Element F;
  nlohmann::ordered_json trace;
};

/// Extends f from the cells of z to the whole (grid) domain of f without
/// zeros: winding-matched rotation factors plus a nearest-cell extension of
/// the remaining logarithm over C (d = 2), sign and log-modulus interpolation
/// over R (d = 1). An obstruction is returned when a hole of z inside K carries
/// nonzero winding (or, over R, a sign change).
std::variant<ZeroFreeExtension, ObstructionReport> zero_free_extension(const Element& f, const RasterDomain& z);

/// Searches a with f + a g invertible. Constructive for finite products (any
/// n), circles over C (n = 1), planar grids over C (n = 1) and interval grids
/// over R (n = 1); other shapes throw ScopeError carrying the hole-condition
/// decision.
Reduction reduce_tuple(const Tuple& f, const Element& g, const ReduceOptions& options = {});

/// Like reduce_tuple, but lands in the principal component.
Principal reduce_to_principal(const Tuple& f, const Element& g, const ReduceOptions& options = {});

/// Completes u = (f_1, ..., f_n, g) to a matrix of determinant one with first
/// row u (as the first row of W^-1), given x with f + g x invertible.
RowExtension extend_row(const Tuple& u, const Tuple& x);
RowExtension extend_row(const Tuple& u, const ReductionWitness& reduction);

/// Witness for (f_σ(1), ..., f_σ(n)) given one for f.
PrincipalWitness permute_principal_witness(const Tuple& f, const Element& g, const std::vector<std::size_t>& sigma,
                                           const PrincipalWitness& witness);

PrincipalWitness principal_from_exp_reducible(const Tuple& a, const Element& g, const ExpReducibilityWitness& witness);

/// b from reduce_tuple, x = -log(a + b g). LogObstruction propagates.
ExpReducibilityWitness exp_reduce_pair_bsr1(const Element& a, const Element& g, const ReduceOptions& options = {});

double verify_exp_reducibility(const Tuple& a, const Element& g, const ExpReducibilityWitness& witness);
/// min |f + a g|.
double verify_reduction(const Tuple& f, const Element& g, const Tuple& a);
/// sup |e_1 ∏ exp(L_j) - (f + a g)|, including |e^h - (f + a g)| for n = 1.
double verify_principal(const Tuple& f, const Element& g, const PrincipalWitness& witness);

EquivalenceWitness equivalence_reflexive(const Tuple& f);
/// From f ~ t to t ~ f.
EquivalenceWitness equivalence_symmetric(const Element& g, const EquivalenceWitness& w);
/// From f ~ t (w1) and t ~ s (w2) to f ~ s.
EquivalenceWitness equivalence_transitive(const Element& g, const EquivalenceWitness& w1, const EquivalenceWitness& w2);
/// sup |f + g x - t ∏ exp(L_j)|.
double verify_equivalence(const Tuple& f, const Element& g, const Tuple& target, const EquivalenceWitness& w);

struct PathSample {
  double t = 0.0;
  double min_modulus = 0.0;  ///< min over the spectrum of |(H(t), g)|
};

struct PathReport {
  std::vector<PathSample> samples;
  double min_modulus = 0.0;
  double endpoint_residual = 0.0;  ///< sup |H(1) - f|
};

/// Samples H(t) = t̃ ∏ exp(t L_j) - t g x on [0, 1]; throws PathLeavesI_n when
/// a sample is not invertible together with g or H(1) misses f.
PathReport exp_class_path(const Tuple& f, const Element& g, const Tuple& target, const EquivalenceWitness& w,
                          std::size_t samples, std::optional<double> tol = std::nullopt);

struct TransferResult {
  bool accepted = false;
  double gap = 0.0;  ///< sup over the eps-zero set of |f - b|
  double delta = 0.0;  ///< min over the eps-zero set of |f|
  std::optional<ReductionWitness> witness;
  std::optional<EquivalenceWitness> link;  ///< f ~ b + a_b g
  std::optional<PathReport> path;
};

/// Moves a reduction of b to f when f and b are within δ/2 on the eps-zero set.
TransferResult perturb_transfer(const Tuple& f, const Element& g, const Tuple& b, const ReductionWitness& witness,
                                const ReduceOptions& options = {});

}  // namespace banach
