// Acceptance checks. Prints one PASS/FAIL line per criterion.
//
//   acceptance            run every criterion
//   acceptance 3 7        run the listed ones
//
// Exit status: 0 when every selected criterion passes, 1 when one fails,
// 77 when the only failures are blocked (missing benchmark data).
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <numeric>
#include <optional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "pgc/circuit.hpp"
#include "pgc/compose.hpp"
#include "pgc/dataset.hpp"
#include "pgc/determinant.hpp"
#include "pgc/kernel.hpp"
#include "pgc/learn/gradient.hpp"
#include "pgc/learn/model.hpp"
#include "pgc/learn/train.hpp"
#include "pgc/mass_circuit.hpp"
#include "pgc/poly.hpp"
#include "pgc/spanning_tree.hpp"
#include "pgc/text_format.hpp"

using pgc::DetBackend;
using pgc::Kernel;
using pgc::KernelKind;
using namespace pgc::learn;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

enum class Outcome { kPass, kFail, kBlocked };

struct Result {
  Outcome outcome = Outcome::kPass;
  std::string detail;
};

// Collects failures; the first few are kept for the report line.
class Checker {
 public:
  void expect(bool ok, const std::string& what) {
    ++checks_;
    if (ok) return;
    if (failures_++ < 3) notes_ += (notes_.empty() ? "" : "; ") + what;
  }
  void near(double got, double want, double tol, const std::string& what) {
    std::ostringstream os;
    os << what << " got " << got << " want " << want;
    expect(std::abs(got - want) <= tol, os.str());
  }
  Result result(const std::string& summary) const {
    if (failures_ == 0) return {Outcome::kPass, summary};
    return {Outcome::kFail, std::to_string(failures_) + " of " + std::to_string(checks_) +
                                " checks failed: " + notes_};
  }

 private:
  std::size_t checks_ = 0;
  std::size_t failures_ = 0;
  std::string notes_;
};

std::string fmt(double v, int precision = 4) {
  std::ostringstream os;
  os.precision(precision);
  os << v;
  return os.str();
}

std::uint32_t mask_of_row(std::size_t r, std::size_t n) {
  std::uint32_t s = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (r >> (n - 1 - i) & 1u) s |= 1u << i;
  }
  return s;
}

std::filesystem::path fixture_path(const std::string& name) {
  return std::filesystem::path(PGC_FIXTURE_DIR) / name;
}

// ---- 1 ----

Result running_example() {
  const auto start = Clock::now();
  Checker ck;
  std::vector<std::pair<std::string, pgc::CircuitPtr>> reps{
      {"pgc", fixture::compact_pgc()},
      {"pc", pgc::to_pgc(fixture::mass_circuit())},
      {"lensemble", pgc::lensemble_gp(fixture::l_beta())},
      {"marginal-kernel", pgc::dpp_gp(fixture::k_beta())},
      {"pgc-file", pgc::load_pgc(fixture_path("fig1b.pgc"))},
      {"pc-file", pgc::to_pgc(pgc::load_pmc(fixture_path("fig1c.pmc")))},
      {"lensemble-file", pgc::lensemble_gp(pgc::load_kernel(fixture_path("lbeta.kernel")))},
      {"marginal-kernel-file", pgc::dpp_gp(pgc::load_kernel(fixture_path("kbeta.kernel")))},
  };
  for (const auto& [name, c] : reps) {
    const auto joint = pgc::expand_joint(*c);
    for (std::size_t r = 0; r < 8; ++r) {
      ck.near(joint[r], fixture::kJoint[r], 1e-9, name + " row " + std::to_string(r));
    }
  }
  const Eigen::MatrixXd shifted = fixture::l_beta().matrix + Eigen::MatrixXd::Identity(3, 3);
  const double z = pgc::det_numeric(shifted);
  ck.near(z, 50.0, 1e-12, "det(L + I)");
  ck.near(oracle::cofactor_det(shifted), 50.0, 1e-12, "det(L + I) by cofactors");
  const std::vector<std::uint8_t> x{1, 0, 1};
  ck.near(pgc::likelihood(*pgc::lensemble_gp(fixture::l_beta()), x), 0.08, 1e-12, "Pr(1,0,1)");
  const double elapsed = seconds_since(start);
  ck.expect(elapsed < 1.0, "took " + fmt(elapsed) + " s");
  return ck.result("8 representations agree, det(L+I)=" + fmt(z, 12) + ", " + fmt(elapsed) +
                   " s");
}

// ---- 2 ----

struct Instance {
  std::string kind;
  pgc::CircuitPtr circuit;
  std::vector<double> joint;  // oracle, bitmask order
};

// Local bitmask of a global one under a sorted scope.
std::uint32_t restrict_mask(std::uint32_t s, const std::vector<std::size_t>& scope) {
  std::uint32_t out = 0;
  for (std::size_t j = 0; j < scope.size(); ++j) {
    if (s >> scope[j] & 1u) out |= 1u << j;
  }
  return out;
}

std::uint32_t scope_mask(const std::vector<std::size_t>& scope) {
  std::uint32_t out = 0;
  for (std::size_t v : scope) out |= 1u << v;
  return out;
}

Instance random_base(pgc::Rng& rng, int kind, std::size_t n, DetBackend backend) {
  const auto ni = static_cast<Eigen::Index>(n);
  switch (kind) {
    case 0: {
      const auto pc = oracle::random_pc(rng, n);
      return {"pc", pgc::to_pgc(pc), oracle::pc_joint(pc)};
    }
    case 1: {
      const Kernel l{oracle::random_psd(rng, ni), KernelKind::kLEnsemble};
      return {"lensemble", pgc::lensemble_gp(l, backend), oracle::lensemble_joint(l.matrix)};
    }
    case 2: {
      const Kernel k{oracle::random_marginal_kernel(rng, ni), KernelKind::kMarginal};
      return {"marginal-kernel", pgc::dpp_gp(k, backend), oracle::marginal_kernel_joint(k.matrix)};
    }
    default: {
      const auto d = oracle::random_det_pgc(rng, n, 3, backend, rng.below(2) == 0);
      auto by_def = oracle::joint_by_mobius(
          [&](std::span<const double> z) { return oracle::det_pgc_by_definition(d, z); }, n);
      return {"detpgc", d.circuit.circuit, std::move(by_def)};
    }
  }
}

Instance random_instance(pgc::Rng& rng, int kind, std::size_t n, DetBackend backend) {
  if (kind < 4) return random_base(rng, kind, n, backend);
  const std::size_t rows = std::size_t{1} << n;
  if (kind == 4 && n >= 2) {
    // Product over a random cut of the variables.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.shuffle(std::span<std::size_t>(order));
    const auto cut = static_cast<std::ptrdiff_t>(1 + rng.below(n - 1));
    std::vector<std::size_t> sf(order.begin(), order.begin() + cut);
    std::vector<std::size_t> sg(order.begin() + cut, order.end());
    std::sort(sf.begin(), sf.end());
    std::sort(sg.begin(), sg.end());
    const auto f = random_base(rng, static_cast<int>(rng.below(4)), sf.size(), backend);
    const auto g = random_base(rng, static_cast<int>(rng.below(4)), sg.size(), backend);
    const auto p = pgc::product({f.circuit, sf}, {g.circuit, sg});
    std::vector<double> joint(rows);
    for (std::uint32_t s = 0; s < rows; ++s) {
      joint[s] = f.joint[restrict_mask(s, sf)] * g.joint[restrict_mask(s, sg)];
    }
    return {"product", p.circuit, std::move(joint)};
  }
  // Mixture of a full-scope component and one over a random subset.
  std::vector<std::size_t> all(n), sub;
  std::iota(all.begin(), all.end(), std::size_t{0});
  for (std::size_t v = 0; v < n; ++v) {
    if (rng.below(2)) sub.push_back(v);
  }
  if (sub.empty()) sub.push_back(static_cast<std::size_t>(rng.below(n)));
  const double alpha = rng.uniform(0.1, 0.9);
  const auto f = random_base(rng, static_cast<int>(rng.below(4)), n, backend);
  const auto g = random_base(rng, static_cast<int>(rng.below(4)), sub.size(), backend);
  const auto m = pgc::mix({f.circuit, all}, {g.circuit, sub}, alpha);
  const std::uint32_t inside = scope_mask(sub);
  std::vector<double> joint(rows);
  for (std::uint32_t s = 0; s < rows; ++s) {
    joint[s] = alpha * f.joint[s];
    if ((s & ~inside) == 0) joint[s] += (1.0 - alpha) * g.joint[restrict_mask(s, sub)];
  }
  return {"mixture", m.circuit, std::move(joint)};
}

Result oracle_equivalence() {
  const auto start = Clock::now();
  Checker ck;
  pgc::Rng rng(2024);
  std::size_t circuits = 0, marginals = 0, likelihoods = 0;
  for (int trial = 0; trial < 240; ++trial) {
    const int kind = trial % 6;
    const std::size_t n = (kind == 4 ? 2 : 1) + rng.below(kind == 4 ? 9 : 10);
    const auto backend = trial % 4 < 2 ? DetBackend::kBird : DetBackend::kEvalInterp;
    const auto inst = random_instance(rng, kind, n, backend);
    const std::string tag = inst.kind + " #" + std::to_string(trial);
    if (inst.circuit->num_vars() != n) {
      ck.expect(false, tag + " has the wrong variable count");
      continue;
    }
    ++circuits;
    for (std::uint32_t s = 0; s < (1u << n); ++s) {
      ck.near(pgc::likelihood(*inst.circuit, oracle::bits(s, n)), inst.joint[s], 1e-9,
              tag + " likelihood " + std::to_string(s));
      ++likelihoods;
    }
    if (n > 6) continue;
    // Every pattern in {0, 1, free}^n.
    std::size_t patterns = 1;
    for (std::size_t i = 0; i < n; ++i) patterns *= 3;
    for (std::size_t code = 0; code < patterns; ++code) {
      pgc::MarginalQuery q;
      std::uint32_t ones = 0, zeros = 0;
      std::size_t c = code;
      for (std::size_t i = 0; i < n; ++i, c /= 3) {
        if (c % 3 == 1) {
          q.ones.push_back(i);
          ones |= 1u << i;
        } else if (c % 3 == 2) {
          q.zeros.push_back(i);
          zeros |= 1u << i;
        }
      }
      ck.near(pgc::marginal(*inst.circuit, q), oracle::marginal_from_joint(inst.joint, ones, zeros),
              1e-9, tag + " marginal " + std::to_string(code));
      ++marginals;
    }
  }
  const double elapsed = seconds_since(start);
  ck.expect(elapsed < 300.0, "took " + fmt(elapsed) + " s");
  return ck.result(std::to_string(circuits) + " circuits, " + std::to_string(marginals) +
                   " marginals, " + std::to_string(likelihoods) + " likelihoods, " +
                   fmt(elapsed) + " s");
}

// ---- 3 ----

Result kernel_equivalence() {
  Checker ck;
  pgc::Rng rng(303);
  std::size_t kernels = 0;
  for (int trial = 0; trial < 120; ++trial) {
    const std::size_t n = 1 + rng.below(8);
    const auto ni = static_cast<Eigen::Index>(n);
    const auto backend = trial % 2 ? DetBackend::kBird : DetBackend::kEvalInterp;
    const std::string tag = "kernel #" + std::to_string(trial);

    // L-ensemble: circuit likelihoods against det(L_S) / det(L + I).
    const Kernel l{oracle::random_psd(rng, ni), KernelKind::kLEnsemble};
    const auto gl = pgc::lensemble_gp(l, backend);
    const auto expect = oracle::lensemble_joint(l.matrix);
    for (std::uint32_t s = 0; s < (1u << n); ++s) {
      ck.near(pgc::likelihood(*gl, oracle::bits(s, n)), expect[s], 1e-9, tag + " L joint");
    }
    // Its marginal kernel gives the same distribution.
    const auto gk_from_l = pgc::dpp_gp(pgc::l_to_marginal_kernel(l), backend);
    const auto round = pgc::expand_joint(*gk_from_l);
    for (std::size_t r = 0; r < round.size(); ++r) {
      ck.near(round[r], expect[mask_of_row(r, n)], 1e-9, tag + " round trip");
    }

    // Marginal kernel: inclusion marginals against det(K_A).
    const Kernel k{oracle::random_marginal_kernel(rng, ni), KernelKind::kMarginal};
    const auto gk = pgc::dpp_gp(k, backend);
    const auto kjoint = oracle::marginal_kernel_joint(k.matrix);
    for (std::uint32_t s = 0; s < (1u << n); ++s) {
      std::vector<std::size_t> a;
      for (std::size_t i = 0; i < n; ++i) {
        if (s >> i & 1u) a.push_back(i);
      }
      ck.near(pgc::marginal(*gk, {a, {}}), oracle::det(oracle::submatrix(k.matrix, s)), 1e-9,
              tag + " K marginal");
      ck.near(pgc::likelihood(*gk, oracle::bits(s, n)), kjoint[s], 1e-9, tag + " K joint");
    }
    kernels += 2;
  }
  return ck.result(std::to_string(kernels) + " kernels with n <= 8");
}

// ---- 4 ----

struct RandomPolyMatrix {
  pgc::PolyMatrix poly;
  std::vector<std::vector<oracle::Coeffs>> raw;
};

RandomPolyMatrix random_poly_matrix(pgc::Rng& rng, std::size_t n, std::size_t max_deg,
                                    std::size_t cap) {
  RandomPolyMatrix out{pgc::PolyMatrix(n, cap), std::vector<std::vector<oracle::Coeffs>>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      oracle::Coeffs c(1 + rng.below(max_deg + 1));
      for (double& v : c) v = rng.uniform(-1.0, 1.0);
      out.poly(i, j) = pgc::Poly(c, cap);
      out.raw[i].push_back(std::move(c));
    }
  }
  return out;
}

void compare_coeffs(Checker& ck, const pgc::Poly& got, const oracle::Coeffs& want,
                    const std::string& tag) {
  double scale = 1.0;
  for (double v : want) scale = std::max(scale, std::abs(v));
  for (std::size_t k = 0; k < want.size(); ++k) {
    ck.near(got.coef(k), want[k], 1e-7 * scale, tag + " t^" + std::to_string(k));
  }
}

Result determinant_backends() {
  Checker ck;
  pgc::Rng rng(404);
  for (int trial = 0; trial < 120; ++trial) {
    const std::size_t n = 1 + rng.below(6);
    const std::size_t cap = 1 + rng.below(4 * n);
    const auto m = random_poly_matrix(rng, n, 4, cap);
    compare_coeffs(ck, pgc::det_bird(m.poly), oracle::cofactor_det(m.raw, cap),
                   "bird/cofactor #" + std::to_string(trial));
  }
  for (int trial = 0; trial < 120; ++trial) {
    const std::size_t n = 1 + rng.below(12);
    const std::size_t cap = 1 + rng.below(4 * n);
    const auto m = random_poly_matrix(rng, n, 4, cap);
    const auto bird = pgc::det_bird(m.poly);
    oracle::Coeffs want(cap + 1);
    for (std::size_t k = 0; k <= cap; ++k) want[k] = bird.coef(k);
    compare_coeffs(ck, pgc::det_evalinterp(m.poly), want,
                   "bird/evalinterp #" + std::to_string(trial));
  }
  return ck.result("120 bird/cofactor (n <= 6), 120 bird/evalinterp (n <= 12, degree <= 4)");
}

// ---- 5 ----

Result det_pgc_structure() {
  Checker ck;
  pgc::Rng rng(505);
  std::size_t same = 0, cross = 0;
  for (int trial = 0; trial < 120; ++trial) {
    const std::size_t n = 2 + rng.below(9);
    const auto backend = trial % 2 ? DetBackend::kBird : DetBackend::kEvalInterp;
    const auto d = oracle::random_det_pgc(rng, n, 4, backend, trial % 3 == 0);
    const auto& c = *d.circuit.circuit;
    const std::string tag = "detpgc #" + std::to_string(trial);
    // Enumerated joint from the definition, independent of ring marginals.
    const auto joint = oracle::joint_by_mobius(
        [&](std::span<const double> z) { return oracle::det_pgc_by_definition(d, z); }, n);
    const auto m = d.kernel.rows();
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(m, m);
    const Eigen::MatrixXd k = id - (d.kernel + id).inverse();
    std::vector<std::size_t> group_of(n);
    for (std::size_t gi = 0; gi < d.partition.num_groups(); ++gi) {
      for (std::size_t v : d.partition.groups[gi]) group_of[v] = gi;
    }
    for (std::size_t gi = 0; gi < d.partition.num_groups(); ++gi) {
      const auto& g = d.partition.groups[gi];
      const auto ii = static_cast<Eigen::Index>(gi);
      for (std::size_t a = 0; a < g.size(); ++a) {
        for (std::size_t b = a + 1; b < g.size(); ++b) {
          const double leaf = pgc::marginal(*d.leaves[gi], {{a, b}, {}});
          const double want = k(ii, ii) * leaf;
          const std::uint32_t both = (1u << g[a]) | (1u << g[b]);
          ck.near(pgc::marginal(c, {{g[a], g[b]}, {}}), want, 1e-9, tag + " same group");
          ck.near(oracle::marginal_from_joint(joint, both, 0), want, 1e-9,
                  tag + " same group (enumerated)");
          ++same;
        }
      }
    }
    for (std::size_t u = 0; u < n; ++u) {
      for (std::size_t v = u + 1; v < n; ++v) {
        if (group_of[u] == group_of[v]) continue;
        const double both = oracle::marginal_from_joint(joint, (1u << u) | (1u << v), 0);
        const double pu = oracle::marginal_from_joint(joint, 1u << u, 0);
        const double pv = oracle::marginal_from_joint(joint, 1u << v, 0);
        ck.expect(both <= pu * pv + 1e-9, tag + " cross-group pair " + std::to_string(u) + "," +
                                              std::to_string(v));
        ck.near(pgc::marginal(c, {{u, v}, {}}), both, 1e-9, tag + " pair marginal");
        ++cross;
      }
    }
  }
  return ck.result("120 DetPGCs, " + std::to_string(same) + " same-group pairs, " +
                   std::to_string(cross) + " cross-group pairs");
}

// ---- 6 ----

Result spanning_trees() {
  Checker ck;
  const std::vector<double> ones3(3, 1.0), ones6(6, 1.0);
  for (auto backend : {DetBackend::kBird, DetBackend::kEvalInterp}) {
    ck.near(pgc::spanning_tree_gp(pgc::complete_graph(3), 0, backend)->evaluate_numeric(ones3), 3.0,
            1e-9, "K3");
    ck.near(pgc::spanning_tree_gp(pgc::complete_graph(4), 0, backend)->evaluate_numeric(ones6),
            16.0, 1e-9, "K4");
  }
  pgc::Rng rng(606);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 2 + rng.below(5);
    const auto g = oracle::random_connected_graph(rng, n, std::min<std::size_t>(n + 3, 10));
    const auto expect = oracle::spanning_tree_coeffs(g);
    const std::string tag = "graph #" + std::to_string(trial);
    for (std::size_t v = 0; v < n; ++v) {
      const auto coeffs = oracle::joint_by_mobius(*pgc::spanning_tree_gp(g, v));
      for (std::size_t s = 0; s < coeffs.size(); ++s) {
        ck.near(coeffs[s], expect[s], 1e-9, tag + " removed " + std::to_string(v));
      }
    }
  }
  return ck.result("K3=3, K4=16, 30 weighted graphs with every removed vertex");
}

// ---- 7 ----

// Random model away from the symmetric start. Kernels with an eigenvalue
// below 1e-3 are redrawn: there the circuit route's likelihood carries
// rounding noise that central differences cannot resolve.
SimplePgcModel perturbed_model(pgc::Rng& rng, std::size_t n, std::size_t max_group,
                               std::size_t components) {
  for (;;) {
    auto model = init_model(n, oracle::random_partition(rng, n, max_group), components, rng);
    Eigen::VectorXd p = model.pack();
    for (auto& v : p) v += 0.5 * rng.normal();
    model.unpack(p);
    bool ok = true;
    for (const auto& c : model.components) {
      const Eigen::MatrixXd l = c.factor * c.factor.transpose();
      ok &= Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(l).eigenvalues().minCoeff() >= 1e-3;
    }
    if (ok) return model;
  }
}

Result gradients() {
  Checker ck;
  pgc::Rng rng(707);
  double worst_all = 0.0;
  const int models = 24;
  for (int trial = 0; trial < models; ++trial) {
    const std::size_t n = 2 + rng.below(7);
    auto model = perturbed_model(rng, n, 3, 1 + rng.below(3));
    pgc::BinaryMatrix data(0, n);
    std::vector<std::uint8_t> x(n);
    for (int r = 0; r < 25; ++r) {
      for (auto& v : x) v = rng.uniform() < 0.4 ? 1 : 0;
      data.push_row(x);
    }
    const Eigen::VectorXd p0 = model.pack();
    const double h = 1e-5;
    for (auto route : {LikelihoodRoute::kSupport, LikelihoodRoute::kCircuit}) {
      const auto g = nll_and_grad(model, data, route);
      double worst = 0.0;
      for (Eigen::Index i = 0; i < p0.size(); ++i) {
        auto probe = model;
        Eigen::VectorXd p = p0;
        p(i) += h;
        probe.unpack(p);
        const double up = nll_and_grad(probe, data, route).nll;
        p(i) -= 2 * h;
        probe.unpack(p);
        const double down = nll_and_grad(probe, data, route).nll;
        const double fd = (up - down) / (2 * h);
        worst = std::max(worst, std::abs(g.grad(i) - fd) / std::max(1e-3, std::abs(fd)));
      }
      ck.expect(worst < 1e-4, "model #" + std::to_string(trial) + " rel err " + fmt(worst));
      worst_all = std::max(worst_all, worst);
    }
  }
  return ck.result(std::to_string(models) + " models, both routes, worst rel err " +
                   fmt(worst_all, 3));
}

// ---- 8 ----

// Splits 10k generated samples 70/10/20 and trains with the given shape.
struct Recovery {
  double generator_nll = 0.0;
  double trained_nll = 0.0;
};

Recovery recover(const SimplePgcModel& generator, std::size_t K, std::size_t C,
                 std::uint64_t seed) {
  pgc::Rng rng(seed);
  const auto samples = sample_model(generator, 10000, rng);
  const auto data = pgc::split_dataset(samples, seed);
  TrainConfig cfg;
  cfg.K = K;
  cfg.C = C;
  cfg.epochs = 60;
  cfg.batch = 256;
  cfg.lr = 0.05;
  cfg.weight_decay = 0.0;
  cfg.seed = seed;
  const auto result = train(data, cfg);
  return {mean_nll(generator, data.test), mean_nll(result.model, data.test)};
}

Result recovery() {
  Checker ck;
  pgc::Rng rng(808);

  // DetPGC over four pairs with strongly coupled members.
  SimplePgcModel det;
  det.num_vars = 8;
  det.partition.groups = {{0, 1}, {2, 3}, {4, 5}, {6, 7}};
  Eigen::MatrixXd b = Eigen::MatrixXd::Identity(4, 4) + 0.4 * oracle::random_matrix(rng, 4, 4);
  std::vector<Eigen::VectorXd> theta;
  for (int g = 0; g < 4; ++g) {
    Eigen::VectorXd t(3);
    t << rng.uniform(-1.0, 0.0), rng.uniform(-1.0, 0.0), rng.uniform(1.0, 2.0);
    theta.push_back(t);
  }
  det.components.push_back({b, theta});
  det.logits = Eigen::VectorXd::Zero(1);
  const auto r1 = recover(det, 2, 1, 11);
  ck.expect(std::abs(r1.trained_nll - r1.generator_nll) <= 0.05,
            "DetPGC gap " + fmt(r1.trained_nll - r1.generator_nll));

  // Plain DPP: singleton groups, one component.
  SimplePgcModel dpp;
  dpp.num_vars = 8;
  for (std::size_t v = 0; v < 8; ++v) dpp.partition.groups.push_back({v});
  dpp.components.push_back(
      {oracle::random_matrix(rng, 8, 8, 0.6), std::vector<Eigen::VectorXd>(8, Eigen::VectorXd::Zero(1))});
  dpp.logits = Eigen::VectorXd::Zero(1);
  const auto r2 = recover(dpp, 1, 1, 12);
  ck.expect(std::abs(r2.trained_nll - r2.generator_nll) <= 0.05,
            "DPP gap " + fmt(r2.trained_nll - r2.generator_nll));

  return ck.result("DetPGC test NLL " + fmt(r1.trained_nll) + " vs generator " +
                   fmt(r1.generator_nll) + "; DPP " + fmt(r2.trained_nll) + " vs " +
                   fmt(r2.generator_nll));
}

// ---- 9 ----

// Looks for <name>.{train,valid,test}.data, then a single <name>.data
// (0/1 rows) or <name>.baskets (item ids) split with seed 0.
std::optional<pgc::Dataset> find_dataset(const std::filesystem::path& dir,
                                         const std::string& name, std::size_t items) {
  if (std::filesystem::exists(dir / (name + ".train.data"))) {
    return pgc::load_twenty_datasets(dir, name);
  }
  if (std::filesystem::exists(dir / (name + ".data"))) {
    return pgc::split_dataset(pgc::load_binary_csv(dir / (name + ".data")), 0);
  }
  if (std::filesystem::exists(dir / (name + ".baskets")) && items > 0) {
    return pgc::split_dataset(pgc::load_baskets(dir / (name + ".baskets"), items), 0);
  }
  return std::nullopt;
}

std::size_t env_size(const char* name, std::size_t fallback) {
  const char* v = std::getenv(name);
  return v ? static_cast<std::size_t>(std::stoul(v)) : fallback;
}

Result benchmark() {
  const char* root = std::getenv("PGC_DATA_DIR");
  const char* cat_env = std::getenv("PGC_AMAZON_CATEGORY");
  const std::string category = cat_env ? cat_env : "apparel";
  const std::size_t items = env_size("PGC_AMAZON_ITEMS", 0);
  if (!root) return {Outcome::kBlocked, "PGC_DATA_DIR is not set; needs nltcs and " + category};
  const auto nltcs = find_dataset(root, "nltcs", 0);
  const auto amazon = find_dataset(root, category, items);
  if (!nltcs || !amazon) {
    return {Outcome::kBlocked, std::string("missing ") + (nltcs ? "" : "nltcs ") +
                                   (amazon ? "" : category) + " under " + root};
  }
  Checker ck;
  std::string summary;
  struct Target {
    std::string name;
    const pgc::Dataset* data;
    double floor;
  };
  for (const Target& t : {Target{"nltcs", &*nltcs, -6.30}, Target{category, &*amazon, -9.60}}) {
    TrainConfig cfg;
    cfg.C = 4;
    cfg.epochs = env_size("PGC_EPOCHS", 40);
    cfg.threads = 1;
    cfg.seed = 1;
    const auto start = Clock::now();
    cfg.K = 5;
    const auto full = train(*t.data, cfg);
    const double ll = -mean_nll(full.model, t.data->test);
    cfg.K = 1;
    const auto base = train(*t.data, cfg);
    const double ll_base = -mean_nll(base.model, t.data->test);
    const double elapsed = seconds_since(start);
    ck.expect(ll >= t.floor, t.name + " test LL " + fmt(ll) + " below " + fmt(t.floor));
    ck.expect(ll > ll_base, t.name + " K=5 " + fmt(ll) + " does not beat K=1 " + fmt(ll_base));
    ck.expect(elapsed < 1800.0, t.name + " took " + fmt(elapsed) + " s");
    summary += (summary.empty() ? "" : "; ") + t.name + " " + fmt(ll) + " (K=1 " +
               fmt(ll_base) + ", " + fmt(elapsed) + " s)";
  }
  return ck.result(summary);
}

// ---- 10 ----

Result fft_speed() {
  Checker ck;
  pgc::Rng rng(1010);
  const std::size_t degree = 512, cap = 2 * degree;
  std::vector<double> a(degree + 1), b(degree + 1);
  for (auto& v : a) v = rng.uniform(-1.0, 1.0);
  for (auto& v : b) v = rng.uniform(-1.0, 1.0);
  const pgc::Poly pa(a, cap), pb(b, cap);

  const auto want = oracle::schoolbook(a, b, cap);
  const auto naive = pgc::mul(pa, pb, pgc::MulBackend::kNaive);
  const auto fast = pgc::mul(pa, pb, pgc::MulBackend::kFft);
  double err = 0.0;
  for (std::size_t k = 0; k <= cap; ++k) {
    err = std::max({err, std::abs(fast.coef(k) - want[k]), std::abs(naive.coef(k) - want[k])});
  }
  ck.expect(err <= 1e-9, "max coefficient error " + fmt(err));

  // Minimum over interleaved trials, so both backends see the same load.
  const int trials = 80, reps = 20;
  double best[2] = {1e300, 1e300};
  double sink = 0.0;
  for (int t = 0; t < trials; ++t) {
    int i = 0;
    for (auto backend : {pgc::MulBackend::kNaive, pgc::MulBackend::kFft}) {
      const auto start = Clock::now();
      for (int r = 0; r < reps; ++r) sink += pgc::mul(pa, pb, backend).coef(t % cap);
      best[i] = std::min(best[i], seconds_since(start) / reps);
      ++i;
    }
  }
  const double ratio = best[0] / best[1];
  ck.expect(ratio >= 5.0, "speedup " + fmt(ratio, 3) + " below 5");
  ck.expect(std::isfinite(sink), "non-finite products");
  return ck.result("naive " + fmt(best[0] * 1e6) + " us, fft " + fmt(best[1] * 1e6) +
                   " us, speedup " + fmt(ratio, 3) + "x, max error " + fmt(err, 3));
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Result()>>> criteria{
      {"running example in four representations", running_example},
      {"ring marginals and likelihoods match enumeration", oracle_equivalence},
      {"kernel forms agree", kernel_equivalence},
      {"determinant backends agree", determinant_backends},
      {"DetPGC same-group identity and cross-group dependence", det_pgc_structure},
      {"spanning tree polynomials", spanning_trees},
      {"gradients match finite differences", gradients},
      {"training recovers generating models", recovery},
      {"benchmark log-likelihoods", benchmark},
      {"fft multiplication speed", fft_speed},
  };
  std::vector<std::size_t> selected;
  for (int i = 1; i < argc; ++i) {
    const auto id = static_cast<std::size_t>(std::atoi(argv[i]));
    if (id < 1 || id > criteria.size()) {
      std::cerr << "usage: acceptance [criterion 1-" << criteria.size() << "]...\n";
      return 2;
    }
    selected.push_back(id);
  }
  if (selected.empty()) {
    for (std::size_t id = 1; id <= criteria.size(); ++id) selected.push_back(id);
  }
  bool failed = false, blocked = false;
  for (std::size_t id : selected) {
    Result r;
    try {
      r = criteria[id - 1].second();
    } catch (const std::exception& e) {
      r = {Outcome::kFail, std::string("exception: ") + e.what()};
    }
    const char* status = r.outcome == Outcome::kPass ? "PASS" : "FAIL";
    std::cout << status << " " << id << " " << criteria[id - 1].first << ": "
              << (r.outcome == Outcome::kBlocked ? "BLOCKED " : "") << r.detail << std::endl;
    failed |= r.outcome == Outcome::kFail;
    blocked |= r.outcome == Outcome::kBlocked;
  }
  if (failed) return 1;
  return blocked ? 77 : 0;
}
