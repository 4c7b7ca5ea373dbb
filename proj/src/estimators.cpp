#include "sid/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sid/numeric.hpp"

namespace sid {

namespace {

void guard_size(std::size_t n, std::size_t max_n, const char *what) {
  if (n > max_n) {
    std::ostringstream os;
    os << what << " is limited to n <= " << max_n << " (got n = " << n << ")";
    throw Error(ErrorCode::InstanceTooLarge, os.str());
  }
}

// Shifting K by a constant leaves every estimator unchanged. Anchoring at
// K_11 makes constant covariates produce exact zeros.
Eigen::MatrixXd anchored(const Eigen::MatrixXd &kmat) {
  if (kmat.size() == 0) return kmat;
  return kmat.array() - kmat(0, 0);
}

// b_{ijk} = delta_i W_h(Y_i - Y_k) I(Y_j >= Y_k), evaluated from the raw data.
double b_literal(const CensoredDataset &ds, const SmoothingSpec &spec, std::size_t i, std::size_t j,
                 std::size_t k) {
  const auto y = ds.times();
  if (ds.status()[i] == 0 || y[j] < y[k]) return 0.0;
  return smoothing_weight(spec, y[i] - y[k]);
}

// b_{ik}(t) = delta_i W_h(Y_i - t) I(Y_k >= t)
double b_at(const CensoredDataset &ds, const SmoothingSpec &spec, std::size_t i, std::size_t k,
            double t) {
  const auto y = ds.times();
  if (ds.status()[i] == 0 || y[k] < t) return 0.0;
  return smoothing_weight(spec, y[i] - t);
}

SidEstimate make_estimate(double value, EstimatorKind kind, Divergence div, const SmoothingSpec &spec) {
  return SidEstimate{value, kind, std::move(div), spec.h};
}

using MatrixXl = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
using VectorXl = Eigen::Matrix<long double, Eigen::Dynamic, 1>;

// Distinct-index sum for one event time: sum over pairwise-distinct
// (i, j, k, l), none equal to the event row, of f(i,k) K_ij f(j,l) with
// f = w a^T - a w^T. Entries of w and a at the event row must already be zero.
// The six terms cancel heavily when the statistic is near zero, so the
// contraction runs in extended precision.
long double distinct_quadruple_sum(const MatrixXl &kmat, const VectorXl &w, const VectorXl &a) {
  const long double sum_w = w.sum();
  const long double sum_a = a.sum();
  const long double ww = w.squaredNorm();
  const long double aa = a.squaredNorm();
  const long double wa = w.dot(a);

  const VectorXl c = sum_a * w - sum_w * a;  // c_i = sum_k f(i,k)
  const VectorXl kw = kmat * w;
  const VectorXl ka = kmat * a;
  const VectorXl kc = kmat * c;
  const VectorXl w2 = w.cwiseProduct(w);
  const VectorXl a2 = a.cwiseProduct(a);
  const VectorXl wa_vec = w.cwiseProduct(a);
  const auto diag = kmat.diagonal();

  // All indices free.
  const long double full = c.dot(kc);
  // i == j
  const long double t_ij = diag.dot(c.cwiseProduct(c));
  // k == l
  const long double t_kl = aa * w.dot(kw) - 2.0L * wa * w.dot(ka) + ww * a.dot(ka);
  // i == l (and, by symmetry of K, the same value for j == k)
  const long double t_il = c.cwiseProduct(a).dot(kw) - c.cwiseProduct(w).dot(ka);
  // i == j and k == l
  const long double t_ij_kl = diag.dot(aa * w2 - 2.0L * wa * wa_vec + ww * a2);
  // i == l and j == k
  const long double t_il_jk = -2.0L * (w2.dot(kmat * a2) - wa_vec.dot(kmat * wa_vec));
  // Every other coincidence pattern forces i == k or j == l, where f vanishes.
  return full - t_ij - t_kl - 2.0L * t_il + t_ij_kl + t_il_jk;
}

}  // namespace

const char *to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::VEventSum: return "v-event-sum";
    case EstimatorKind::VQuintuple: return "v-quintuple";
    case EstimatorKind::UStatistic: return "u-statistic";
    case EstimatorKind::UBruteForce: return "u-bruteforce";
  }
  return "unknown";
}

SmoothedProcesses build_smoothed_processes(const CensoredDataset &ds, const SmoothingSpec &spec) {
  validate_smoothing(spec);
  const std::size_t n = ds.size();
  const auto y = ds.times();
  const auto delta = ds.status();

  SmoothedProcesses sp;
  sp.n = n;
  for (std::size_t r = 0; r < n; ++r)
    if (delta[r] == 1) sp.event_index.push_back(r);

  const auto ne = static_cast<Eigen::Index>(sp.event_index.size());
  const auto nn = static_cast<Eigen::Index>(n);
  sp.w.resize(nn, ne);
  sp.a.resize(nn, ne);
  sp.s_hat.resize(ne);
  sp.f_hat.resize(ne);
  for (Eigen::Index e = 0; e < ne; ++e) {
    const double t = y[sp.event_index[static_cast<std::size_t>(e)]];
    for (Eigen::Index i = 0; i < nn; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      sp.w(i, e) = delta[ui] == 1 ? smoothing_weight(spec, y[ui] - t) : 0.0;
      sp.a(i, e) = y[ui] >= t ? 1.0 : 0.0;
    }
    sp.s_hat(e) = sp.a.col(e).sum() / static_cast<double>(n);
    sp.f_hat(e) = sp.w.col(e).sum() / static_cast<double>(n);
  }
  return sp;
}

std::array<double, 3> smoothed_terms(const Eigen::MatrixXd &kmat, const SmoothedProcesses &sp,
                                     std::size_t event) {
  const auto e = static_cast<Eigen::Index>(event);
  const auto w = sp.w.col(e);
  const auto a = sp.a.col(e);
  const double n4 = std::pow(static_cast<double>(sp.n), 4);
  const double sum_w = w.sum();
  const double sum_a = a.sum();
  const Eigen::VectorXd kw = kmat * w;
  const Eigen::VectorXd ka = kmat * a;
  return {w.dot(kw) * (sum_a * sum_a) / n4,   // S~_1
          w.dot(ka) * (sum_w * sum_a) / n4,   // S~_2
          a.dot(ka) * (sum_w * sum_w) / n4};  // S~_3
}

double v_event_sum(const Eigen::MatrixXd &kmat, const SmoothedProcesses &sp) {
  const Eigen::MatrixXd k = anchored(kmat);
  CompensatedSum total;
  for (std::size_t e = 0; e < sp.event_count(); ++e) {
    const auto s = smoothed_terms(k, sp, e);
    total.add(s[0] - 2.0 * s[1] + s[2]);
  }
  return total.value() / static_cast<double>(sp.n);
}

double u_statistic(const Eigen::MatrixXd &kmat, const SmoothedProcesses &sp) {
  const MatrixXl k = anchored(kmat).cast<long double>();
  long double total = 0.0L;
  for (std::size_t e = 0; e < sp.event_count(); ++e) {
    const auto col = static_cast<Eigen::Index>(e);
    const auto r = static_cast<Eigen::Index>(sp.event_index[e]);
    VectorXl w = sp.w.col(col).cast<long double>();
    VectorXl a = sp.a.col(col).cast<long double>();
    w(r) = 0.0L;
    a(r) = 0.0L;
    // f(i, k) != 0 needs a row at risk, so two disjoint nonzero pairs need at
    // least two at-risk rows and four rows in the support. Otherwise the
    // slice is exactly zero.
    const auto at_risk = (a.array() != 0.0L).count();
    const auto support = ((a.array() != 0.0L) || (w.array() != 0.0L)).count();
    if (at_risk < 2 || support < 4) continue;
    total += distinct_quadruple_sum(k, w, a);
  }
  return static_cast<double>(total / static_cast<long double>(falling_factorial5(sp.n)));
}

SidEstimate sid_v_event_sum(const CensoredDataset &ds, const CovariateKernel &k,
                            const SmoothingSpec &spec) {
  const auto sp = build_smoothed_processes(ds, spec);
  return make_estimate(v_event_sum(gram_matrix(ds.covariates(), k), sp), EstimatorKind::VEventSum,
                       KernelDivergence{k}, spec);
}

SidEstimate sid_v_quintuple(const CensoredDataset &ds, const CovariateKernel &k,
                            const SmoothingSpec &spec) {
  validate_smoothing(spec);
  const std::size_t n = ds.size();
  guard_size(n, kQuintupleMaxN, "the five-fold V-statistic loop");
  const Eigen::MatrixXd kmat = gram_matrix(ds.covariates(), k);
  const auto delta = ds.status();

  // b[r](i, k) = b_{ikr}
  std::vector<Eigen::MatrixXd> b(n, Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                                          static_cast<Eigen::Index>(n)));
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        b[r](static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = b_literal(ds, spec, i, j, r);

  CompensatedSum total;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t kk = 0; kk < n; ++kk)
        for (std::size_t l = 0; l < n; ++l)
          for (std::size_t r = 0; r < n; ++r) {
            if (delta[r] == 0) continue;
            const auto &br = b[r];
            const auto I = static_cast<Eigen::Index>(i), J = static_cast<Eigen::Index>(j),
                       K = static_cast<Eigen::Index>(kk), L = static_cast<Eigen::Index>(l);
            total.add((br(I, K) - br(K, I)) * kmat(I, J) * (br(J, L) - br(L, J)));
          }
  return make_estimate(total.value() / std::pow(static_cast<double>(n), 5), EstimatorKind::VQuintuple,
                       KernelDivergence{k}, spec);
}

SidEstimate sid_u_statistic(const CensoredDataset &ds, const CovariateKernel &k,
                            const SmoothingSpec &spec) {
  const auto sp = build_smoothed_processes(ds, spec);
  return make_estimate(u_statistic(gram_matrix(ds.covariates(), k), sp), EstimatorKind::UStatistic,
                       KernelDivergence{k}, spec);
}

namespace {

// Literal sum over pairwise-distinct (i, j, k, l, r) of
// [b_ikr - b_kir] M_ij [b_jlr - b_ljr] delta_r, divided by (n)_5.
double distinct_quintuple_loop(const CensoredDataset &ds, const SmoothingSpec &spec,
                               const Eigen::MatrixXd &mmat, std::size_t *visited) {
  const std::size_t n = ds.size();
  const auto delta = ds.status();
  std::size_t count = 0;
  CompensatedSum total;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      for (std::size_t k = 0; k < n; ++k) {
        if (k == i || k == j) continue;
        for (std::size_t l = 0; l < n; ++l) {
          if (l == i || l == j || l == k) continue;
          for (std::size_t r = 0; r < n; ++r) {
            if (r == i || r == j || r == k || r == l) continue;
            ++count;
            if (delta[r] == 0) continue;
            const double left = b_literal(ds, spec, i, k, r) - b_literal(ds, spec, k, i, r);
            const double right = b_literal(ds, spec, j, l, r) - b_literal(ds, spec, l, j, r);
            total.add(left * mmat(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * right);
          }
        }
      }
    }
  if (visited != nullptr) *visited = count;
  return total.value() / falling_factorial5(n);
}

}  // namespace

SidEstimate sid_u_bruteforce(const CensoredDataset &ds, const CovariateKernel &k,
                             const SmoothingSpec &spec, std::size_t *terms_visited) {
  validate_smoothing(spec);
  guard_size(ds.size(), kBruteForceMaxN, "the brute-force U-statistic");
  const Eigen::MatrixXd kmat = gram_matrix(ds.covariates(), k);
  return make_estimate(distinct_quintuple_loop(ds, spec, kmat, terms_visited),
                       EstimatorKind::UBruteForce, KernelDivergence{k}, spec);
}

SidEstimate sid_beta_v(const CensoredDataset &ds, double beta, const SmoothingSpec &spec) {
  auto est = sid_v_event_sum(ds, DistanceInducedKernel{beta}, spec);
  return make_estimate(2.0 * est.value, EstimatorKind::VEventSum, BetaDivergence{beta}, spec);
}

SidEstimate sid_beta_u(const CensoredDataset &ds, double beta, const SmoothingSpec &spec) {
  auto est = sid_u_statistic(ds, DistanceInducedKernel{beta}, spec);
  return make_estimate(2.0 * est.value, EstimatorKind::UStatistic, BetaDivergence{beta}, spec);
}

double sid_rho_v_event_sum(const CensoredDataset &ds, const NormPowerSemimetric &rho,
                           const SmoothingSpec &spec) {
  const auto sp = build_smoothed_processes(ds, spec);
  const Eigen::MatrixXd dmat = semimetric_matrix(ds.covariates(), rho);
  CompensatedSum total;
  for (std::size_t e = 0; e < sp.event_count(); ++e) {
    const auto s = smoothed_terms(dmat, sp, e);
    total.add(-s[0] + 2.0 * s[1] - s[2]);
  }
  return total.value() / static_cast<double>(sp.n);
}

double sid_rho_u_bruteforce(const CensoredDataset &ds, const NormPowerSemimetric &rho,
                            const SmoothingSpec &spec) {
  validate_smoothing(spec);
  guard_size(ds.size(), kBruteForceMaxN, "the brute-force U-statistic");
  return -distinct_quintuple_loop(ds, spec, semimetric_matrix(ds.covariates(), rho), nullptr);
}

double projection_u_hat(const Eigen::MatrixXd &kmat, const SmoothedProcesses &sp, std::size_t i,
                        std::size_t j, std::size_t event) {
  const auto a = sp.a.col(static_cast<Eigen::Index>(event));
  const double at_risk = a.sum();
  const auto I = static_cast<Eigen::Index>(i);
  const auto J = static_cast<Eigen::Index>(j);
  const double mean_i = kmat.row(I).dot(a) / at_risk;
  const double mean_j = kmat.row(J).dot(a) / at_risk;
  const double grand = a.dot(kmat * a) / (at_risk * at_risk);
  return kmat(I, J) - mean_i - mean_j + grand;
}

double projection_v_hat(const SmoothedProcesses &sp, std::size_t i, std::size_t j, std::size_t event) {
  const auto e = static_cast<Eigen::Index>(event);
  const double s = sp.s_hat(e);
  const double f = sp.f_hat(e);
  const double vi = sp.w(static_cast<Eigen::Index>(i), e) * s - sp.a(static_cast<Eigen::Index>(i), e) * f;
  const double vj = sp.w(static_cast<Eigen::Index>(j), e) * s - sp.a(static_cast<Eigen::Index>(j), e) * f;
  return vi * vj;
}

std::pair<double, double> symmetrized_kernel_check(const CensoredDataset &ds,
                                                   const std::array<std::size_t, 4> &idx, double t,
                                                   const SmoothingSpec &spec,
                                                   const Eigen::MatrixXd &kmat) {
  validate_smoothing(spec);
  auto f = [&](std::size_t p, std::size_t q) {
    return b_at(ds, spec, idx[p], idx[q], t) - b_at(ds, spec, idx[q], idx[p], t);
  };
  auto kk = [&](std::size_t p, std::size_t q) {
    return kmat(static_cast<Eigen::Index>(idx[p]), static_cast<Eigen::Index>(idx[q]));
  };

  std::array<std::size_t, 4> perm{0, 1, 2, 3};
  CompensatedSum total;
  do {
    const auto [i, j, k, l] = perm;
    total.add(f(i, k) * kk(i, j) * f(j, l));
  } while (std::next_permutation(perm.begin(), perm.end()));
  const double averaged = total.value() / 24.0;

  constexpr std::size_t i = 0, j = 1, k = 2, l = 3;
  const double closed = ((kk(i, j) - kk(i, l) - kk(j, k) + kk(k, l)) * f(i, k) * f(j, l) +
                         (kk(i, j) - kk(j, l) - kk(i, k) + kk(k, l)) * f(i, l) * f(j, k) +
                         (kk(i, k) - kk(i, l) - kk(j, k) + kk(j, l)) * f(i, j) * f(k, l)) /
                        12.0;
  return {averaged, closed};
}

}  // namespace sid
