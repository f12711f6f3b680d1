#include "pgc/kernel.hpp"

#include <algorithm>
#include <cmath>

#include "pgc/errors.hpp"

namespace pgc {
namespace {

// Bird's algorithm cost: n-1 rounds of an upper-triangular times full
// product, plus the n^2 products forming the matrix entries.
std::size_t bird_cost(std::size_t n) {
  if (n == 0) return 0;
  return (n - 1) * n * n * (n + 1) / 2 + n * n;
}

/// det(A + B diag(z)) / normalizer, where A and B are fixed real matrices.
/// Covers both L-ensembles (A = I, B = L) and marginal kernels
/// (A = I - K, B = K).
class AffineDeterminantCircuit final : public Circuit {
 public:
  AffineDeterminantCircuit(Eigen::MatrixXd constant, Eigen::MatrixXd linear,
                           double normalizer, DetBackend backend)
      : constant_(std::move(constant)),
        linear_(std::move(linear)),
        normalizer_(normalizer),
        backend_(backend) {}

  std::size_t num_vars() const override {
    return static_cast<std::size_t>(linear_.rows());
  }

  Poly evaluate_ring(std::span<const Poly> leaf_values,
                     std::size_t cap) const override {
    check_leaf_values(leaf_values, cap);
    const std::size_t n = num_vars();
    PolyMatrix m(n, cap);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const auto ii = static_cast<Eigen::Index>(i);
        const auto jj = static_cast<Eigen::Index>(j);
        Poly entry = scale(leaf_values[j], linear_(ii, jj));
        if (constant_(ii, jj) != 0.0) {
          entry.add_scaled(Poly::constant(constant_(ii, jj), cap), 1.0);
        }
        m(i, j) = std::move(entry);
      }
    }
    return scale(det_ring(m, backend_), 1.0 / normalizer_);
  }

  double evaluate_numeric(std::span<const double> z) const override {
    if (z.size() != num_vars()) {
      throw ContractViolation("evaluate_numeric: dimension mismatch");
    }
    Eigen::MatrixXd m = constant_;
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      m.col(j) += linear_.col(j) * z[static_cast<std::size_t>(j)];
    }
    return det_numeric(m) / normalizer_;
  }

  std::size_t size() const override { return bird_cost(num_vars()); }

 private:
  Eigen::MatrixXd constant_;
  Eigen::MatrixXd linear_;
  double normalizer_;
  DetBackend backend_;
};

}  // namespace

std::string to_string(KernelKind kind) {
  switch (kind) {
    case KernelKind::kLEnsemble:
      return "lensemble";
    case KernelKind::kMarginal:
      return "marginal";
    case KernelKind::kNonsymmetricL:
      return "nonsymmetric";
  }
  return "unknown";
}

KernelKind kernel_kind_from_string(const std::string& s) {
  if (s == "lensemble" || s == "L") return KernelKind::kLEnsemble;
  if (s == "marginal" || s == "K") return KernelKind::kMarginal;
  if (s == "nonsymmetric") return KernelKind::kNonsymmetricL;
  throw ContractViolation("unknown kernel kind '" + s + "'");
}

KernelReport validate_kernel(const Kernel& k, std::size_t limit) {
  KernelReport rep;
  const auto& m = k.matrix;
  if (m.rows() != m.cols()) {
    rep.reason = "kernel matrix is not square";
    return rep;
  }
  if (!m.allFinite()) {
    rep.reason = "kernel has non-finite entries";
    return rep;
  }
  rep.symmetric = (m - m.transpose()).cwiseAbs().maxCoeff() <= kSymmetryTolerance ||
                  m.size() == 0;

  if (k.kind == KernelKind::kNonsymmetricL) {
    const Eigen::MatrixXd shifted =
        m + Eigen::MatrixXd::Identity(m.rows(), m.cols());
    if (!(det_numeric(shifted) > 0.0)) {
      rep.reason = "det(L + I) is not positive";
      return rep;
    }
    rep.behavioral = validate_semantics(*lensemble_gp(k), limit);
    rep.valid = rep.behavioral->nonnegative;
    if (!rep.valid) rep.reason = "induced distribution has negative entries";
    return rep;
  }

  if (!rep.symmetric) {
    rep.reason = "kernel is not symmetric";
    return rep;
  }
  if (m.size() == 0) {
    rep.valid = true;
    return rep;
  }
  const Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym,
                                                     Eigen::EigenvaluesOnly);
  rep.min_eigenvalue = eig.eigenvalues().minCoeff();
  rep.max_eigenvalue = eig.eigenvalues().maxCoeff();
  const double floor = -kEigenTolerance * std::max(1.0, rep.max_eigenvalue);
  if (rep.min_eigenvalue < floor) {
    rep.reason = "kernel is not positive semidefinite";
    return rep;
  }
  if (k.kind == KernelKind::kMarginal &&
      rep.max_eigenvalue > 1.0 + kEigenTolerance) {
    rep.reason = "marginal kernel has an eigenvalue above 1";
    return rep;
  }
  rep.valid = true;
  return rep;
}

CircuitPtr lensemble_gp(const Kernel& l, DetBackend backend) {
  if (l.kind == KernelKind::kMarginal) {
    throw ContractViolation("lensemble_gp: expected an L-ensemble kernel");
  }
  if (l.matrix.rows() != l.matrix.cols()) {
    throw ContractViolation("lensemble_gp: kernel is not square");
  }
  const Eigen::MatrixXd id =
      Eigen::MatrixXd::Identity(l.matrix.rows(), l.matrix.cols());
  const double normalizer = det_numeric(Eigen::MatrixXd(l.matrix + id));
  if (!(normalizer > 1e-12)) {
    throw NumericalError("lensemble_gp: degenerate kernel, det(L + I) = " +
                         std::to_string(normalizer));
  }
  return std::make_shared<AffineDeterminantCircuit>(id, l.matrix, normalizer,
                                                    backend);
}

CircuitPtr dpp_gp(const Kernel& k, DetBackend backend) {
  if (k.kind != KernelKind::kMarginal) {
    throw ContractViolation("dpp_gp: expected a marginal kernel");
  }
  const auto rep = validate_kernel(k);
  if (!rep.valid) throw RefusalError("dpp_gp: " + rep.reason);
  const Eigen::MatrixXd id =
      Eigen::MatrixXd::Identity(k.matrix.rows(), k.matrix.cols());
  return std::make_shared<AffineDeterminantCircuit>(id - k.matrix, k.matrix,
                                                    1.0, backend);
}

Eigen::MatrixXd principal_submatrix(const Eigen::MatrixXd& m,
                                    std::span<const std::size_t> idx) {
  const auto d = static_cast<Eigen::Index>(idx.size());
  Eigen::MatrixXd out(d, d);
  for (Eigen::Index a = 0; a < d; ++a) {
    for (Eigen::Index b = 0; b < d; ++b) {
      const auto ia = static_cast<Eigen::Index>(idx[static_cast<std::size_t>(a)]);
      const auto ib = static_cast<Eigen::Index>(idx[static_cast<std::size_t>(b)]);
      if (ia >= m.rows() || ib >= m.cols()) {
        throw ContractViolation("principal_submatrix: index out of range");
      }
      out(a, b) = m(ia, ib);
    }
  }
  return out;
}

double dpp_marginal_direct(const Kernel& k, std::span<const std::size_t> a) {
  return det_numeric(principal_submatrix(k.matrix, a));
}

Kernel l_to_marginal_kernel(const Kernel& l) {
  const Eigen::MatrixXd id =
      Eigen::MatrixXd::Identity(l.matrix.rows(), l.matrix.cols());
  // K = L (L + I)^{-1} = I - (L + I)^{-1}
  const Eigen::MatrixXd inv =
      Eigen::PartialPivLU<Eigen::MatrixXd>(l.matrix + id).inverse();
  Eigen::MatrixXd k = id - inv;
  if (l.kind == KernelKind::kLEnsemble) k = 0.5 * (k + k.transpose());
  return Kernel{std::move(k), KernelKind::kMarginal};
}

}  // namespace pgc
