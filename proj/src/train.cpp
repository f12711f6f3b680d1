#include "pgc/learn/train.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "pgc/circuit.hpp"
#include "pgc/learn/gradient.hpp"
#include "pgc/learn/partition.hpp"

namespace pgc::learn {

Adam::Adam(std::size_t num_params, AdamConfig config)
    : config_(config),
      m_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(num_params))),
      v_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(num_params))) {}

void Adam::step(Eigen::VectorXd& params, const Eigen::VectorXd& grad) {
  if (params.size() != m_.size() || grad.size() != m_.size()) {
    throw ContractViolation("Adam::step: size mismatch");
  }
  ++t_;
  const Eigen::VectorXd g = grad + config_.weight_decay * params;
  m_ = config_.beta1 * m_ + (1.0 - config_.beta1) * g;
  v_ = config_.beta2 * v_ + (1.0 - config_.beta2) * g.cwiseAbs2();
  const double c1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
  params.array() -= config_.lr * (m_.array() / c1) /
                    ((v_.array() / c2).sqrt() + config_.eps);
}

void TrainConfig::validate() const {
  if (K == 0 || C == 0) throw ContractViolation("train: K and C must be >= 1");
  if (K > kMaxLeafGroup) {
    throw ContractViolation("train: K must be <= " + std::to_string(kMaxLeafGroup));
  }
  if (batch == 0) throw ContractViolation("train: batch must be >= 1");
  if (!(lr > 0.0)) throw ContractViolation("train: learning rate must be positive");
  if (!(weight_decay >= 0.0)) throw ContractViolation("train: weight decay must be >= 0");
}

double mean_nll(const SimplePgcModel& model, const BinaryMatrix& data,
                LikelihoodRoute route, std::size_t threads) {
  return -average_log_likelihood(model, data, route, threads);
}

TrainResult train(const Dataset& data, const TrainConfig& config) {
  config.validate();
  if (data.train.empty() || data.valid.empty()) {
    throw RefusalError("train: train and valid splits must be nonempty");
  }
  if (data.train.cols() != data.num_vars || data.valid.cols() != data.num_vars) {
    throw ContractViolation("train: split width differs from num_vars");
  }
  Rng rng(config.seed);
  auto partition = partition_variables(estimate_pairwise(data.train), config.K);
  TrainResult result;
  result.model = init_model(data.num_vars, std::move(partition), config.C, rng);

  auto evaluate = [&](std::size_t epoch) {
    EpochLog e;
    e.epoch = epoch;
    try {
      e.train_nll = mean_nll(result.model, data.train, config.route, config.threads);
      e.valid_nll = mean_nll(result.model, data.valid, config.route, config.threads);
    } catch (const NumericalError& err) {
      throw DivergenceError(std::string("epoch ") + std::to_string(epoch) + ": " +
                                err.what(),
                            result.log);
    }
    if (!std::isfinite(e.train_nll) || !std::isfinite(e.valid_nll)) {
      result.log.push_back(e);
      throw DivergenceError("epoch " + std::to_string(epoch) + ": non-finite NLL",
                            result.log);
    }
    result.log.push_back(e);
    return e;
  };

  SimplePgcModel working = result.model;
  double best_valid = evaluate(0).valid_nll;
  Adam adam(working.num_parameters(),
            {config.lr, 0.9, 0.999, 1e-8, config.weight_decay});
  Eigen::VectorXd params = working.pack();
  std::vector<std::size_t> order(data.train.rows());
  std::iota(order.begin(), order.end(), std::size_t{0});

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    for (std::size_t b = 0; b < order.size(); b += config.batch) {
      const std::size_t e = std::min(order.size(), b + config.batch);
      NllGrad ng;
      try {
        ng = nll_and_grad(working, data.train,
                          std::span<const std::size_t>(order).subspan(b, e - b),
                          config.route, config.threads);
      } catch (const NumericalError& err) {
        throw DivergenceError("epoch " + std::to_string(epoch) + ": " + err.what(),
                              result.log);
      }
      adam.step(params, ng.grad);
      if (!params.allFinite()) {
        throw DivergenceError("epoch " + std::to_string(epoch) +
                                  ": parameters became non-finite",
                              result.log);
      }
      working.unpack(params);
    }
    std::swap(result.model, working);
    const EpochLog e = evaluate(epoch);
    std::swap(result.model, working);
    if (e.valid_nll < best_valid) {
      best_valid = e.valid_nll;
      result.best_epoch = epoch;
      result.model = working;
    }
  }
  return result;
}

GridResult grid_search(const Dataset& data, const TrainConfig& config) {
  if (config.K_grid.empty() || config.C_grid.empty()) {
    throw ContractViolation("grid_search: grids must be nonempty");
  }
  GridResult out;
  double best_valid = std::numeric_limits<double>::infinity();
  bool any = false;
  for (std::size_t k : config.K_grid) {
    for (std::size_t c : config.C_grid) {
      TrainConfig cell_config = config;
      cell_config.K = k;
      cell_config.C = c;
      GridCell cell;
      cell.K = k;
      cell.C = c;
      try {
        TrainResult r = train(data, cell_config);
        cell.ok = true;
        cell.valid_nll = r.selected().valid_nll;
        cell.train_nll = r.selected().train_nll;
        cell.best_epoch = r.best_epoch;
        if (cell.valid_nll < best_valid) {
          best_valid = cell.valid_nll;
          out.best = out.cells.size();
          out.best_model = std::move(r);
        }
        any = true;
      } catch (const std::exception& e) {
        cell.error = e.what();
      }
      out.cells.push_back(std::move(cell));
    }
  }
  if (!any) throw NumericalError("grid_search: every cell failed");
  if (!data.test.empty()) {
    out.test_nll = mean_nll(out.best_model.model, data.test, config.route, config.threads);
  }
  return out;
}

BinaryMatrix sample_model(const SimplePgcModel& model, std::size_t count,
                          Rng& rng) {
  const std::size_t n = model.num_vars;
  if (n > kDefaultEnumerationLimit) {
    throw RefusalError("sample_model: " + std::to_string(n) +
                       " variables exceeds the enumeration limit");
  }
  const ModelEvaluator eval(model, LikelihoodRoute::kSupport);
  const std::size_t rows = std::size_t{1} << n;
  std::vector<double> cdf(rows);
  double acc = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    acc += std::exp(eval.log_likelihood(assignment_from_index(r, n)));
    cdf[r] = acc;
  }
  BinaryMatrix out(0, n);
  for (std::size_t i = 0; i < count; ++i) {
    const double u = rng.uniform() * acc;
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    const auto r = static_cast<std::size_t>(
        std::min<std::ptrdiff_t>(it - cdf.begin(), static_cast<std::ptrdiff_t>(rows - 1)));
    out.push_row(assignment_from_index(r, n));
  }
  return out;
}

}  // namespace pgc::learn
