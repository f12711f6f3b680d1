#include "pgc/learn/model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "pgc/parallel.hpp"

namespace pgc::learn {

namespace {

Eigen::VectorXd softmax(const Eigen::VectorXd& v) {
  if (v.size() == 0) return v;
  const double top = v.maxCoeff();
  Eigen::VectorXd e = (v.array() - top).exp();
  return e / e.sum();
}

double log_sum_exp(const Eigen::VectorXd& v) {
  const double top = v.maxCoeff();
  return top + std::log((v.array() - top).exp().sum());
}

std::size_t leaf_size(std::size_t k) { return (std::size_t{1} << k) - 1; }

}  // namespace

std::shared_ptr<const NodeCircuit> leaf_gp(std::span<const double> theta,
                                           std::size_t k) {
  if (k == 0 || k > kMaxLeafGroup) {
    throw ContractViolation("leaf_gp: group size must be in 1.." +
                            std::to_string(kMaxLeafGroup));
  }
  if (theta.size() != leaf_size(k)) {
    throw ContractViolation("leaf_gp: expected " +
                            std::to_string(leaf_size(k)) + " parameters");
  }
  const Eigen::VectorXd w = softmax(
      Eigen::Map<const Eigen::VectorXd>(theta.data(),
                                        static_cast<Eigen::Index>(theta.size())));
  CircuitBuilder b;
  std::vector<NodeId> var(k);
  for (std::size_t j = 0; j < k; ++j) var[j] = b.var(j);
  std::vector<WeightedEdge> terms;
  terms.reserve(theta.size());
  for (std::uint32_t s = 1; s <= theta.size(); ++s) {
    NodeId term;
    if (std::has_single_bit(s)) {
      term = var[static_cast<std::size_t>(std::countr_zero(s))];
    } else {
      std::vector<NodeId> factors;
      for (std::size_t j = 0; j < k; ++j) {
        if (s >> j & 1u) factors.push_back(var[j]);
      }
      term = b.product(std::move(factors));
    }
    terms.push_back({term, w(s - 1)});
  }
  b.sum(std::move(terms));
  return std::move(b).build(k);
}

void SimplePgcModel::validate() const {
  partition.validate(num_vars);
  const auto m = static_cast<Eigen::Index>(partition.num_groups());
  if (components.empty()) throw ContractViolation("model: no components");
  if (logits.size() != static_cast<Eigen::Index>(components.size())) {
    throw ContractViolation("model: one logit per component required");
  }
  for (const auto& c : components) {
    if (c.factor.rows() != m || c.factor.cols() != m) {
      throw ContractViolation("model: factor must be groups x groups");
    }
    if (c.theta.size() != partition.num_groups()) {
      throw ContractViolation("model: one theta vector per group required");
    }
    for (std::size_t g = 0; g < c.theta.size(); ++g) {
      const std::size_t k = partition.groups[g].size();
      if (k > kMaxLeafGroup ||
          static_cast<std::size_t>(c.theta[g].size()) != leaf_size(k)) {
        throw ContractViolation("model: theta size mismatch for group " +
                                std::to_string(g));
      }
    }
  }
}

Eigen::VectorXd SimplePgcModel::mixture_weights() const {
  return softmax(logits);
}

std::size_t SimplePgcModel::num_parameters() const {
  std::size_t total = static_cast<std::size_t>(logits.size());
  for (const auto& c : components) {
    total += static_cast<std::size_t>(c.factor.size());
    for (const auto& t : c.theta) total += static_cast<std::size_t>(t.size());
  }
  return total;
}

Eigen::VectorXd SimplePgcModel::pack() const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(num_parameters()));
  Eigen::Index pos = 0;
  for (const auto& c : components) {
    for (Eigen::Index i = 0; i < c.factor.rows(); ++i) {
      for (Eigen::Index j = 0; j < c.factor.cols(); ++j) out(pos++) = c.factor(i, j);
    }
    for (const auto& t : c.theta) {
      out.segment(pos, t.size()) = t;
      pos += t.size();
    }
  }
  out.segment(pos, logits.size()) = logits;
  return out;
}

void SimplePgcModel::unpack(const Eigen::VectorXd& params) {
  if (params.size() != static_cast<Eigen::Index>(num_parameters())) {
    throw ContractViolation("unpack: parameter count mismatch");
  }
  Eigen::Index pos = 0;
  for (auto& c : components) {
    for (Eigen::Index i = 0; i < c.factor.rows(); ++i) {
      for (Eigen::Index j = 0; j < c.factor.cols(); ++j) c.factor(i, j) = params(pos++);
    }
    for (auto& t : c.theta) {
      t = params.segment(pos, t.size());
      pos += t.size();
    }
  }
  logits = params.segment(pos, logits.size());
}

SimplePgcModel init_model(std::size_t num_vars, GroupPartition partition,
                          std::size_t num_components, Rng& rng) {
  partition.validate(num_vars);
  if (num_components == 0) throw ContractViolation("init_model: C must be >= 1");
  SimplePgcModel model;
  model.num_vars = num_vars;
  model.partition = std::move(partition);
  const auto m = static_cast<Eigen::Index>(model.partition.num_groups());
  for (std::size_t c = 0; c < num_components; ++c) {
    Component comp;
    comp.factor = Eigen::MatrixXd::Identity(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
      for (Eigen::Index j = 0; j < m; ++j) comp.factor(i, j) += 0.01 * rng.normal();
    }
    for (const auto& g : model.partition.groups) {
      if (g.size() > kMaxLeafGroup) {
        throw ContractViolation("init_model: group larger than " +
                                std::to_string(kMaxLeafGroup));
      }
      Eigen::VectorXd t(static_cast<Eigen::Index>(leaf_size(g.size())));
      for (Eigen::Index s = 0; s < t.size(); ++s) t(s) = 0.1 * rng.normal();
      comp.theta.push_back(std::move(t));
    }
    model.components.push_back(std::move(comp));
  }
  model.logits = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(num_components));
  return model;
}

ComponentCache::ComponentCache(const Component& c, std::size_t component_index) {
  if (!c.factor.allFinite()) {
    throw ComponentError("non-finite kernel factor", component_index);
  }
  kernel = c.factor * c.factor.transpose();
  const auto m = kernel.rows();
  Eigen::LLT<Eigen::MatrixXd> llt(kernel + Eigen::MatrixXd::Identity(m, m));
  if (llt.info() != Eigen::Success) {
    throw ComponentError("L + I is not positive definite", component_index);
  }
  log_normalizer = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  normalizer_inv = llt.solve(Eigen::MatrixXd::Identity(m, m));
  std::size_t offset = 0;
  for (const auto& t : c.theta) {
    if (!t.allFinite()) throw ComponentError("non-finite leaf parameter", component_index);
    leaf_prob.push_back(softmax(t));
    theta_offset.push_back(offset);
    offset += static_cast<std::size_t>(t.size());
  }
}

std::vector<std::uint32_t> group_masks(const GroupPartition& p,
                                       std::span<const std::uint8_t> x) {
  std::vector<std::uint32_t> masks(p.num_groups(), 0);
  for (std::size_t g = 0; g < p.num_groups(); ++g) {
    const auto& members = p.groups[g];
    for (std::size_t k = 0; k < members.size(); ++k) {
      if (x[members[k]]) masks[g] |= std::uint32_t{1} << k;
    }
  }
  return masks;
}

double support_log_likelihood(const ComponentCache& cache,
                              std::span<const std::uint32_t> masks,
                              std::size_t component_index) {
  std::vector<Eigen::Index> support;
  double lp = -cache.log_normalizer;
  for (std::size_t g = 0; g < masks.size(); ++g) {
    if (masks[g] == 0) continue;
    support.push_back(static_cast<Eigen::Index>(g));
    lp += std::log(cache.leaf_prob[g](masks[g] - 1));
  }
  if (!support.empty()) {
    const Eigen::MatrixXd sub = cache.kernel(support, support);
    Eigen::LLT<Eigen::MatrixXd> llt(sub);
    if (llt.info() == Eigen::Success) {
      lp += 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    } else {
      const double det = sub.determinant();
      if (det < -1e-12) {
        throw ComponentError("negative principal minor", component_index);
      }
      if (det <= 0.0) return -std::numeric_limits<double>::infinity();
      lp += std::log(det);
    }
  }
  if (std::isnan(lp)) throw ComponentError("log-likelihood is NaN", component_index);
  return lp;
}

double mixture_log_sum(std::span<const double> log_weights,
                       std::span<const double> lp) {
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < lp.size(); ++c) top = std::max(top, log_weights[c] + lp[c]);
  if (!std::isfinite(top)) return top;
  double acc = 0.0;
  for (std::size_t c = 0; c < lp.size(); ++c) acc += std::exp(log_weights[c] + lp[c] - top);
  return top + std::log(acc);
}

ModelEvaluator::ModelEvaluator(const SimplePgcModel& model, LikelihoodRoute route,
                               DetBackend backend)
    : model_(&model), route_(route) {
  model.validate();
  const double lse = log_sum_exp(model.logits);
  for (Eigen::Index c = 0; c < model.logits.size(); ++c) {
    log_weights_.push_back(model.logits(c) - lse);
  }
  for (std::size_t c = 0; c < model.components.size(); ++c) {
    const auto& comp = model.components[c];
    if (route == LikelihoodRoute::kSupport) {
      caches_.emplace_back(comp, c);
      continue;
    }
    std::vector<CircuitPtr> leaves;
    for (std::size_t g = 0; g < comp.theta.size(); ++g) {
      leaves.push_back(leaf_gp(std::span<const double>(comp.theta[g].data(),
                                                       static_cast<std::size_t>(comp.theta[g].size())),
                               model.partition.groups[g].size()));
    }
    try {
      circuits_.push_back(det_pgc(comp.factor, model.partition, leaves, backend));
    } catch (const NumericalError& e) {
      throw ComponentError(e.what(), c);
    }
  }
}

double ModelEvaluator::component_log_likelihood(
    std::size_t c, std::span<const std::uint8_t> x) const {
  if (x.size() != model_->num_vars) {
    throw ContractViolation("log_likelihood: expected " +
                            std::to_string(model_->num_vars) + " values");
  }
  if (route_ == LikelihoodRoute::kSupport) {
    return support_log_likelihood(caches_.at(c),
                                  group_masks(model_->partition, x), c);
  }
  const double p = likelihood(*circuits_.at(c).circuit, x);
  if (std::isnan(p) || p < -1e-12) {
    throw ComponentError("circuit likelihood " + std::to_string(p), c);
  }
  return p <= 0.0 ? -std::numeric_limits<double>::infinity() : std::log(p);
}

double ModelEvaluator::log_likelihood(std::span<const std::uint8_t> x) const {
  std::vector<double> lp(model_->components.size());
  for (std::size_t c = 0; c < lp.size(); ++c) lp[c] = component_log_likelihood(c, x);
  return mixture_log_sum(log_weights_, lp);
}

double model_log_likelihood(const SimplePgcModel& model,
                            std::span<const std::uint8_t> x,
                            LikelihoodRoute route) {
  return ModelEvaluator(model, route).log_likelihood(x);
}

double average_log_likelihood(const SimplePgcModel& model,
                              const BinaryMatrix& data, LikelihoodRoute route,
                              std::size_t threads, DetBackend backend) {
  if (data.empty()) throw RefusalError("average_log_likelihood: no rows");
  const ModelEvaluator eval(model, route, backend);
  const std::size_t chunks = (data.rows() + kChunkRows - 1) / kChunkRows;
  std::vector<double> sums(chunks, 0.0);
  for_each_chunk(data.rows(), threads, [&](std::size_t c, std::size_t b, std::size_t e) {
    double s = 0.0;
    for (std::size_t r = b; r < e; ++r) s += eval.log_likelihood(data.row(r));
    sums[c] = s;
  });
  const double total = tree_reduce(std::move(sums), [](double& a, double b) { a += b; });
  return total / static_cast<double>(data.rows());
}

}  // namespace pgc::learn
