#ifndef PGC_LEARN_MODEL_HPP
#define PGC_LEARN_MODEL_HPP

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "pgc/circuit.hpp"
#include "pgc/compose.hpp"
#include "pgc/dataset.hpp"
#include "pgc/errors.hpp"
#include "pgc/random.hpp"

namespace pgc::learn {

/// Fully general generating polynomial over k variables with no constant
/// term: (1/Z) sum over nonempty S of exp(theta[S]) z^S, where subset S is
/// the bitmask s (bit j = local variable j) and theta[s - 1] is its
/// parameter. Z normalizes.
std::shared_ptr<const NodeCircuit> leaf_gp(std::span<const double> theta,
                                           std::size_t k);

/// One DetPGC: kernel factor B (L = B B^T, one row per group) and per-group
/// leaf parameters, theta[g] of length 2^|group g| - 1.
struct Component {
  Eigen::MatrixXd factor;
  std::vector<Eigen::VectorXd> theta;
};

/// Mixture of DetPGCs sharing one variable partition; mixture weights are
/// softmax(logits).
struct SimplePgcModel {
  std::size_t num_vars = 0;
  GroupPartition partition;
  std::vector<Component> components;
  Eigen::VectorXd logits;

  /// Throws ContractViolation on inconsistent shapes.
  void validate() const;

  Eigen::VectorXd mixture_weights() const;

  /// Flat parameter vector. Per component: factor (row-major) then each
  /// group's theta; mixture logits last.
  std::size_t num_parameters() const;
  Eigen::VectorXd pack() const;
  void unpack(const Eigen::VectorXd& params);
};

/// Largest group size accepted by init_model (2^12 - 1 leaf parameters).
inline constexpr std::size_t kMaxLeafGroup = 12;

/// Factor = I + 0.01 N(0,1), theta ~ N(0, 0.1^2), logits zero.
SimplePgcModel init_model(std::size_t num_vars, GroupPartition partition,
                          std::size_t num_components, Rng& rng);

/// kCircuit builds each component as a determinantal PGC and answers
/// likelihoods through ring evaluation (evalinterp determinants). kSupport
/// uses the closed form that follows from the leaves having no constant
/// term: only groups with a one contribute, so
///   Pr(x) = det(L_T) / det(L + I) * prod_{g in T} Pr_g(x_g).
enum class LikelihoodRoute { kCircuit, kSupport };

class ComponentError : public NumericalError {
 public:
  ComponentError(const std::string& what, std::size_t component)
      : NumericalError("component " + std::to_string(component) + ": " + what),
        component_(component) {}
  std::size_t component() const { return component_; }

 private:
  std::size_t component_;
};

/// Per-component quantities that do not depend on the sample.
struct ComponentCache {
  Eigen::MatrixXd kernel;           // L = B B^T
  double log_normalizer = 0.0;      // log det(L + I)
  Eigen::MatrixXd normalizer_inv;   // (L + I)^{-1}
  std::vector<Eigen::VectorXd> leaf_prob;  // softmax(theta[g])
  std::vector<std::size_t> theta_offset;   // offset of group g in the
                                           // component's theta block

  ComponentCache(const Component& c, std::size_t component_index);
};

/// Bit k set iff the k-th member of group g is one in x.
std::vector<std::uint32_t> group_masks(const GroupPartition& p,
                                       std::span<const std::uint8_t> x);

/// log Pr_c(x) by the support route.
double support_log_likelihood(const ComponentCache& cache,
                              std::span<const std::uint32_t> masks,
                              std::size_t component_index);

/// log of sum_c w_c exp(lp_c), guarded; w are log mixture weights.
double mixture_log_sum(std::span<const double> log_weights,
                       std::span<const double> lp);

/// Precomputes what a route needs so many samples can be scored.
class ModelEvaluator {
 public:
  /// `backend` is used by the circuit route only.
  ModelEvaluator(const SimplePgcModel& model, LikelihoodRoute route,
                 DetBackend backend = DetBackend::kEvalInterp);

  double log_likelihood(std::span<const std::uint8_t> x) const;
  double component_log_likelihood(std::size_t c,
                                  std::span<const std::uint8_t> x) const;

  /// The determinantal PGC of component c over all variables.
  const ScopedCircuit& component_circuit(std::size_t c) const {
    return circuits_.at(c);
  }

 private:
  const SimplePgcModel* model_;
  LikelihoodRoute route_;
  std::vector<ComponentCache> caches_;
  std::vector<ScopedCircuit> circuits_;
  std::vector<double> log_weights_;
};

double model_log_likelihood(const SimplePgcModel& model,
                            std::span<const std::uint8_t> x,
                            LikelihoodRoute route = LikelihoodRoute::kCircuit);

/// Mean log-likelihood over all rows, in nats.
double average_log_likelihood(const SimplePgcModel& model,
                              const BinaryMatrix& data,
                              LikelihoodRoute route = LikelihoodRoute::kSupport,
                              std::size_t threads = 1,
                              DetBackend backend = DetBackend::kEvalInterp);

}  // namespace pgc::learn

#endif  // PGC_LEARN_MODEL_HPP
