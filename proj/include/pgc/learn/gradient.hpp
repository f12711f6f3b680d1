#ifndef PGC_LEARN_GRADIENT_HPP
#define PGC_LEARN_GRADIENT_HPP

#include <cstddef>
#include <span>

#include <Eigen/Dense>

#include "pgc/dataset.hpp"
#include "pgc/learn/model.hpp"

namespace pgc::learn {

struct NllGrad {
  double nll = 0.0;       // mean negative log-likelihood
  Eigen::VectorXd grad;   // d nll / d params, in pack() layout
};

/// Mean NLL of the selected rows and its exact gradient. kSupport
/// differentiates the closed form; kCircuit differentiates the
/// evaluation-interpolation determinant used by the circuit route. Both give
/// the same value up to rounding. Rows are processed in fixed chunks and
/// reduced in a fixed order, so the result does not depend on `threads`.
NllGrad nll_and_grad(const SimplePgcModel& model, const BinaryMatrix& data,
                     std::span<const std::size_t> rows,
                     LikelihoodRoute route = LikelihoodRoute::kSupport,
                     std::size_t threads = 1);

/// All rows.
NllGrad nll_and_grad(const SimplePgcModel& model, const BinaryMatrix& data,
                     LikelihoodRoute route = LikelihoodRoute::kSupport,
                     std::size_t threads = 1);

}  // namespace pgc::learn

#endif  // PGC_LEARN_GRADIENT_HPP
