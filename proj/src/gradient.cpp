#include "pgc/learn/gradient.hpp"

#include <bit>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>
#include <utility>
#include <vector>

#include "pgc/parallel.hpp"

namespace pgc::learn {

namespace {

using cd = std::complex<double>;

// d lp_c / d(L, theta) for one sample, before mixture weighting. dl is the
// gradient with respect to L(idx, idx) and excludes the normalizer term,
// which is added once per batch.
struct Record {
  double lp = 0.0;
  std::vector<Eigen::Index> idx;
  Eigen::MatrixXd dl;
  std::vector<std::pair<std::size_t, double>> dtheta;
};

Record support_record(const ComponentCache& cache,
                      std::span<const std::uint32_t> masks, std::size_t c) {
  Record rec;
  rec.lp = support_log_likelihood(cache, masks, c);
  if (!std::isfinite(rec.lp)) {
    throw ComponentError("zero likelihood for a training sample", c);
  }
  for (std::size_t g = 0; g < masks.size(); ++g) {
    if (masks[g] == 0) continue;
    rec.idx.push_back(static_cast<Eigen::Index>(g));
    const auto& q = cache.leaf_prob[g];
    for (Eigen::Index s = 0; s < q.size(); ++s) {
      const double ind = static_cast<std::uint32_t>(s + 1) == masks[g] ? 1.0 : 0.0;
      rec.dtheta.emplace_back(cache.theta_offset[g] + static_cast<std::size_t>(s),
                              ind - q(s));
    }
  }
  if (!rec.idx.empty()) {
    const Eigen::MatrixXd sub = cache.kernel(rec.idx, rec.idx);
    rec.dl = sub.inverse();
  }
  return rec;
}

// Reverse mode through the interpolated determinant: with phi_b(p) the
// leaf polynomial of group b at the p-th root of unity and
// M_p = I + L diag(phi(p)),
//   coef = Re(1/D sum_p w^{-a p} det M_p)
// is the likelihood before normalization.
Record circuit_record(const ComponentCache& cache,
                      std::span<const std::uint32_t> masks, std::size_t c) {
  const auto m = cache.kernel.rows();
  const auto groups = static_cast<std::size_t>(m);
  std::size_t a = 0;
  std::vector<std::vector<double>> f(groups);
  for (std::size_t g = 0; g < groups; ++g) {
    const std::uint32_t mask = masks[g];
    a += static_cast<std::size_t>(std::popcount(mask));
    f[g].assign(static_cast<std::size_t>(std::popcount(mask)) + 1, 0.0);
    if (mask == 0) continue;
    const auto& q = cache.leaf_prob[g];
    for (std::uint32_t s = 1; s <= static_cast<std::uint32_t>(q.size()); ++s) {
      if ((s & ~mask) == 0) f[g][static_cast<std::size_t>(std::popcount(s))] += q(s - 1);
    }
  }
  const std::size_t d = a + 1;
  const Eigen::MatrixXcd lc = cache.kernel.cast<cd>();

  struct Point {
    cd omega;
    cd det;
    Eigen::VectorXcd phi;
    Eigen::MatrixXcd inv;
  };
  std::vector<Point> pts(d);
  cd acc = 0.0;
  for (std::size_t p = 0; p < d; ++p) {
    auto& pt = pts[p];
    pt.omega = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(p) /
                                   static_cast<double>(d));
    pt.phi.resize(m);
    for (std::size_t g = 0; g < groups; ++g) {
      cd v = 0.0;
      for (std::size_t k = f[g].size(); k-- > 0;) v = v * pt.omega + f[g][k];
      pt.phi(static_cast<Eigen::Index>(g)) = v;
    }
    const Eigen::MatrixXcd mat =
        Eigen::MatrixXcd::Identity(m, m) + lc * pt.phi.asDiagonal();
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(mat);
    pt.det = lu.determinant();
    if (std::abs(pt.det) == 0.0) {
      throw ComponentError("singular matrix in interpolation", c);
    }
    pt.inv = lu.inverse();
    acc += std::pow(pt.omega, -static_cast<double>(a)) * pt.det;
  }
  const double coef = acc.real() / static_cast<double>(d);
  if (!(coef > 0.0) || !std::isfinite(coef)) {
    throw ComponentError("non-positive likelihood " + std::to_string(coef), c);
  }

  Record rec;
  rec.lp = std::log(coef) - cache.log_normalizer;
  rec.idx.resize(groups);
  std::iota(rec.idx.begin(), rec.idx.end(), Eigen::Index{0});
  rec.dl = Eigen::MatrixXd::Zero(m, m);
  std::vector<double> dtheta(cache.theta_offset.empty()
                                 ? 0
                                 : cache.theta_offset.back() +
                                       static_cast<std::size_t>(cache.leaf_prob.back().size()),
                             0.0);
  for (const auto& pt : pts) {
    const cd wd = std::pow(pt.omega, -static_cast<double>(a)) * pt.det /
                  (static_cast<double>(d) * coef);
    rec.dl += (wd * pt.inv.transpose() * pt.phi.asDiagonal()).real();
    const Eigen::VectorXcd dphi = wd * (pt.inv * lc).diagonal();
    for (std::size_t g = 0; g < groups; ++g) {
      const auto& q = cache.leaf_prob[g];
      const cd phi = pt.phi(static_cast<Eigen::Index>(g));
      const cd up = dphi(static_cast<Eigen::Index>(g));
      for (std::uint32_t s = 1; s <= static_cast<std::uint32_t>(q.size()); ++s) {
        const cd ind = (s & ~masks[g]) == 0
                           ? std::pow(pt.omega, std::popcount(s))
                           : cd(0.0);
        dtheta[cache.theta_offset[g] + s - 1] += (up * q(s - 1) * (ind - phi)).real();
      }
    }
  }
  for (std::size_t i = 0; i < dtheta.size(); ++i) rec.dtheta.emplace_back(i, dtheta[i]);
  return rec;
}

struct Accum {
  double loglik = 0.0;
  std::vector<Eigen::MatrixXd> dl;
  std::vector<double> norm_weight;
  std::vector<Eigen::VectorXd> dtheta;
  Eigen::VectorXd dlogit;

  void add(const Accum& o) {
    loglik += o.loglik;
    for (std::size_t c = 0; c < dl.size(); ++c) {
      dl[c] += o.dl[c];
      norm_weight[c] += o.norm_weight[c];
      dtheta[c] += o.dtheta[c];
    }
    dlogit += o.dlogit;
  }
};

Accum zero_accum(const SimplePgcModel& model) {
  Accum a;
  const auto m = static_cast<Eigen::Index>(model.partition.num_groups());
  for (const auto& comp : model.components) {
    a.dl.push_back(Eigen::MatrixXd::Zero(m, m));
    a.norm_weight.push_back(0.0);
    Eigen::Index nt = 0;
    for (const auto& t : comp.theta) nt += t.size();
    a.dtheta.push_back(Eigen::VectorXd::Zero(nt));
  }
  a.dlogit = Eigen::VectorXd::Zero(model.logits.size());
  return a;
}

}  // namespace

NllGrad nll_and_grad(const SimplePgcModel& model, const BinaryMatrix& data,
                     std::span<const std::size_t> rows, LikelihoodRoute route,
                     std::size_t threads) {
  model.validate();
  if (rows.empty()) throw RefusalError("nll_and_grad: no rows");
  if (data.cols() != model.num_vars) {
    throw ContractViolation("nll_and_grad: data has " + std::to_string(data.cols()) +
                            " columns, model has " + std::to_string(model.num_vars));
  }
  const std::size_t nc = model.components.size();
  std::vector<ComponentCache> caches;
  for (std::size_t c = 0; c < nc; ++c) caches.emplace_back(model.components[c], c);
  const Eigen::VectorXd pi = model.mixture_weights();
  std::vector<double> log_w(nc);
  for (std::size_t c = 0; c < nc; ++c) log_w[c] = std::log(pi(static_cast<Eigen::Index>(c)));

  const std::size_t chunks = (rows.size() + kChunkRows - 1) / kChunkRows;
  std::vector<Accum> parts(chunks);
  for_each_chunk(rows.size(), threads, [&](std::size_t chunk, std::size_t b, std::size_t e) {
    Accum acc = zero_accum(model);
    std::vector<Record> recs(nc);
    std::vector<double> lp(nc);
    for (std::size_t i = b; i < e; ++i) {
      const auto x = data.row(rows[i]);
      const auto masks = group_masks(model.partition, x);
      for (std::size_t c = 0; c < nc; ++c) {
        recs[c] = route == LikelihoodRoute::kSupport
                      ? support_record(caches[c], masks, c)
                      : circuit_record(caches[c], masks, c);
        lp[c] = recs[c].lp;
      }
      const double total = mixture_log_sum(log_w, lp);
      if (!std::isfinite(total)) {
        throw NumericalError("non-finite log-likelihood at row " + std::to_string(rows[i]));
      }
      acc.loglik += total;
      for (std::size_t c = 0; c < nc; ++c) {
        const double r = std::exp(log_w[c] + lp[c] - total);
        acc.dlogit(static_cast<Eigen::Index>(c)) += r - pi(static_cast<Eigen::Index>(c));
        acc.norm_weight[c] += r;
        if (!recs[c].idx.empty()) acc.dl[c](recs[c].idx, recs[c].idx) += r * recs[c].dl;
        for (const auto& [k, v] : recs[c].dtheta) {
          acc.dtheta[c](static_cast<Eigen::Index>(k)) += r * v;
        }
      }
    }
    parts[chunk] = std::move(acc);
  });
  const Accum sum = tree_reduce(std::move(parts), [](Accum& a, const Accum& b) { a.add(b); });

  const double scale = -1.0 / static_cast<double>(rows.size());
  NllGrad out;
  out.nll = scale * sum.loglik;
  out.grad.resize(static_cast<Eigen::Index>(model.num_parameters()));
  Eigen::Index pos = 0;
  for (std::size_t c = 0; c < nc; ++c) {
    const Eigen::MatrixXd g = sum.dl[c] - sum.norm_weight[c] * caches[c].normalizer_inv;
    const Eigen::MatrixXd db = scale * (g + g.transpose()) * model.components[c].factor;
    for (Eigen::Index i = 0; i < db.rows(); ++i) {
      for (Eigen::Index j = 0; j < db.cols(); ++j) out.grad(pos++) = db(i, j);
    }
    out.grad.segment(pos, sum.dtheta[c].size()) = scale * sum.dtheta[c];
    pos += sum.dtheta[c].size();
  }
  out.grad.segment(pos, sum.dlogit.size()) = scale * sum.dlogit;
  if (!std::isfinite(out.nll) || !out.grad.allFinite()) {
    throw NumericalError("nll_and_grad: non-finite result");
  }
  return out;
}

NllGrad nll_and_grad(const SimplePgcModel& model, const BinaryMatrix& data,
                     LikelihoodRoute route, std::size_t threads) {
  std::vector<std::size_t> rows(data.rows());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return nll_and_grad(model, data, rows, route, threads);
}

}  // namespace pgc::learn
