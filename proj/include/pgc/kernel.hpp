#ifndef PGC_KERNEL_HPP
#define PGC_KERNEL_HPP

#include <cstddef>
#include <optional>
#include <span>
#include <string>

#include <Eigen/Dense>

#include "pgc/circuit.hpp"
#include "pgc/determinant.hpp"

namespace pgc {

enum class KernelKind { kLEnsemble, kMarginal, kNonsymmetricL };

std::string to_string(KernelKind kind);
KernelKind kernel_kind_from_string(const std::string& s);

struct Kernel {
  Eigen::MatrixXd matrix;
  KernelKind kind = KernelKind::kLEnsemble;

  std::size_t size() const { return static_cast<std::size_t>(matrix.rows()); }
};

inline constexpr double kSymmetryTolerance = 1e-9;
inline constexpr double kEigenTolerance = 1e-8;

struct KernelReport {
  bool valid = false;
  bool symmetric = false;
  double min_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;
  // Set for nonsymmetric kernels: enumeration of the induced distribution.
  std::optional<SemanticsReport> behavioral;
  std::string reason;
};

/// Symmetric kinds: symmetry within kSymmetryTolerance, smallest eigenvalue
/// at least -kEigenTolerance * max(1, largest), and for marginal kernels
/// largest eigenvalue at most 1 + kEigenTolerance. Nonsymmetric L-ensembles
/// are judged by whether their induced joint table is nonnegative.
KernelReport validate_kernel(const Kernel& k,
                             std::size_t limit = kDefaultEnumerationLimit);

/// Generating polynomial det(L diag(z) + I) / det(L + I) of an L-ensemble
/// (symmetric or not). Throws NumericalError if det(L + I) is not positive.
CircuitPtr lensemble_gp(const Kernel& l, DetBackend backend = DetBackend::kBird);

/// Generating polynomial det(I - K + K diag(z)) of a DPP with marginal
/// kernel K. Refuses kernels that fail validate_kernel.
CircuitPtr dpp_gp(const Kernel& k, DetBackend backend = DetBackend::kBird);

/// Pr(X_i = 1 for all i in a) = det(K_a).
double dpp_marginal_direct(const Kernel& k, std::span<const std::size_t> a);

/// K = L (L + I)^{-1}.
Kernel l_to_marginal_kernel(const Kernel& l);

/// Principal submatrix on the given indices.
Eigen::MatrixXd principal_submatrix(const Eigen::MatrixXd& m,
                                    std::span<const std::size_t> idx);

}  // namespace pgc

#endif  // PGC_KERNEL_HPP
