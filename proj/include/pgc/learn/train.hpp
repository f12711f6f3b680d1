#ifndef PGC_LEARN_TRAIN_HPP
#define PGC_LEARN_TRAIN_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pgc/dataset.hpp"
#include "pgc/errors.hpp"
#include "pgc/learn/model.hpp"

namespace pgc::learn {

struct AdamConfig {
  double lr = 0.05;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 1e-4;  // L2 term added to the gradient
};

class Adam {
 public:
  Adam(std::size_t num_params, AdamConfig config);

  void step(Eigen::VectorXd& params, const Eigen::VectorXd& grad);
  std::size_t steps() const { return t_; }

 private:
  AdamConfig config_;
  Eigen::VectorXd m_;
  Eigen::VectorXd v_;
  std::size_t t_ = 0;
};

struct TrainConfig {
  std::size_t K = 2;
  std::size_t C = 4;
  double lr = 0.05;
  std::size_t epochs = 100;
  std::size_t batch = 256;
  double weight_decay = 1e-4;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  LikelihoodRoute route = LikelihoodRoute::kSupport;
  std::vector<std::size_t> K_grid{1, 2, 5, 7};
  std::vector<std::size_t> C_grid{1, 4, 7, 10, 20};

  /// Throws ContractViolation on K, C, epochs or batch of zero, or a
  /// non-positive learning rate.
  void validate() const;
};

/// Mean NLLs (nats) after an epoch; epoch 0 is the initial model.
struct EpochLog {
  std::size_t epoch = 0;
  double train_nll = 0.0;
  double valid_nll = 0.0;
};

struct TrainResult {
  SimplePgcModel model;  // parameters of the best-validation epoch
  std::vector<EpochLog> log;
  std::size_t best_epoch = 0;

  const EpochLog& selected() const { return log.at(best_epoch); }
};

/// Raised when the loss or gradient stops being finite; carries the log up
/// to the failing epoch.
class DivergenceError : public NumericalError {
 public:
  DivergenceError(const std::string& what, std::vector<EpochLog> log)
      : NumericalError(what), log_(std::move(log)) {}
  const std::vector<EpochLog>& log() const { return log_; }

 private:
  std::vector<EpochLog> log_;
};

/// Partitions the variables from train-split statistics with group size at
/// most config.K, then runs minibatch Adam on the mean NLL. Deterministic
/// for a fixed seed.
TrainResult train(const Dataset& data, const TrainConfig& config);

struct GridCell {
  std::size_t K = 0;
  std::size_t C = 0;
  bool ok = false;
  double valid_nll = 0.0;
  double train_nll = 0.0;
  std::size_t best_epoch = 0;
  std::string error;  // set when the cell failed
};

struct GridResult {
  std::vector<GridCell> cells;  // K-major order
  std::size_t best = 0;         // index into cells
  TrainResult best_model;
  double test_nll = 0.0;        // of the selected cell only
};

/// Trains every (K, C) pair of the config grids with the remaining settings
/// held fixed; picks the lowest validation NLL. Failed cells are recorded
/// and skipped; throws NumericalError only if every cell fails.
GridResult grid_search(const Dataset& data, const TrainConfig& config);

/// Mean NLL of a split (nats).
double mean_nll(const SimplePgcModel& model, const BinaryMatrix& data,
                LikelihoodRoute route = LikelihoodRoute::kSupport,
                std::size_t threads = 1);

/// Draws samples by inverse transform over the enumerated joint; refuses
/// more than 20 variables.
BinaryMatrix sample_model(const SimplePgcModel& model, std::size_t count,
                          Rng& rng);

}  // namespace pgc::learn

#endif  // PGC_LEARN_TRAIN_HPP
