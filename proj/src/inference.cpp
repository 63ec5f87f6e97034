#include "trf/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <set>

#include <boost/math/distributions/normal.hpp>

namespace trf {

double trf_probability(const TrfModelParams& params, std::uint32_t n) {
  if (n == 0) return 0.0;
  // -expm1(n*log1p(-q)) keeps precision when q is tiny.
  const double reach = params.q >= 1.0 ? 1.0 : -std::expm1(n * std::log1p(-params.q));
  return params.p * reach;
}

std::vector<FitRow> fit_rows(std::span<const PTrfRow> table) {
  std::vector<FitRow> rows;
  for (const auto& r : table)
    if (r.n > 0) rows.push_back({r.n, r.groups, r.followers});
  return rows;
}

namespace {

struct Row {
  double n, groups, follows;
};

double xlogy(double x, double y) { return x == 0.0 ? 0.0 : x * std::log(y); }

double nll_at(std::span<const Row> rows, double p, double q) {
  double nll = 0.0;
  for (const auto& r : rows) {
    const double prob = trf_probability({p, q}, static_cast<std::uint32_t>(r.n));
    const double misses = r.groups - r.follows;
    if ((r.follows > 0 && prob <= 0.0) || (misses > 0 && prob >= 1.0))
      return std::numeric_limits<double>::infinity();
    nll -= xlogy(r.follows, prob) + (misses == 0.0 ? 0.0 : misses * std::log1p(-prob));
  }
  return nll;
}

// Maximizer of the likelihood in p for fixed q. The score is decreasing in p,
// so Newton steps are kept inside a shrinking bracket.
double best_p(std::span<const Row> rows, double q) {
  std::vector<double> reach(rows.size());
  double k = 0.0, exposure = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    reach[i] = trf_probability({1.0, q}, static_cast<std::uint32_t>(rows[i].n));
    k += rows[i].follows;
    exposure += rows[i].groups * reach[i];
  }
  auto score = [&](double p, double* slope) {
    double s = k / p, ds = -k / (p * p);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const double misses = rows[i].groups - rows[i].follows;
      if (misses == 0.0) continue;
      const double denom = 1.0 - p * reach[i];
      if (denom <= 0.0) {
        s = -std::numeric_limits<double>::infinity();
        continue;
      }
      s -= misses * reach[i] / denom;
      ds -= misses * reach[i] * reach[i] / (denom * denom);
    }
    if (slope) *slope = ds;
    return s;
  };
  if (score(1.0, nullptr) >= 0.0) return 1.0;

  double lo = 0.0, hi = 1.0;
  double p = std::clamp(k / exposure, 1e-300, 0.5);
  for (int it = 0; it < 200; ++it) {
    double slope = 0.0;
    const double s = score(p, &slope);
    if (s > 0.0)
      lo = p;
    else
      hi = p;
    double next = p - s / slope;
    if (!(next > lo && next < hi)) next = lo > 0.0 ? 0.5 * (lo + hi) : 0.5 * hi;
    if (std::abs(next - p) <= 1e-15 * p) return next;
    p = next;
  }
  return p;
}

double profile(std::span<const Row> rows, double q) { return nll_at(rows, best_p(rows, q), q); }

}  // namespace

double fit_nll(std::span<const FitRow> rows, const TrfModelParams& params) {
  std::vector<Row> r;
  for (const auto& x : rows)
    r.push_back({double(x.n), double(x.groups), double(x.follows)});
  return nll_at(r, params.p, params.q);
}

FitResult fit_pq(std::span<const FitRow> input) {
  std::vector<Row> rows;
  std::set<std::uint32_t> distinct;
  double total_follows = 0.0;
  for (const auto& r : input) {
    if (r.follows > r.groups)
      throw Error(Errc::malformed_record, "follows exceed groups at n=" + std::to_string(r.n));
    if (r.groups == 0) continue;
    if (r.n == 0) throw Error(Errc::malformed_record, "fit rows need n >= 1");
    rows.push_back({double(r.n), double(r.groups), double(r.follows)});
    distinct.insert(r.n);
    total_follows += static_cast<double>(r.follows);
  }
  if (distinct.size() < 2)
    throw Error(Errc::underdetermined, "p and q need at least two distinct group sizes");
  if (total_follows == 0.0)
    throw Error(Errc::all_zero_successes, "no follows in any row; p is pinned at 0");

  // Coarse scan over log q, then golden section around the best grid point.
  constexpr int kGrid = 400;
  constexpr double kLogMin = -20.0;  // q down to about 2e-9
  auto q_at = [&](double u) { return std::exp(u); };
  int best = kGrid;
  double best_val = profile(rows, 1.0);
  for (int i = 0; i < kGrid; ++i) {
    const double v = profile(rows, q_at(kLogMin * (1.0 - double(i) / kGrid)));
    if (v < best_val) {
      best_val = v;
      best = i;
    }
  }
  const double step = -kLogMin / kGrid;
  double a = kLogMin + std::max(0, best - 1) * step;
  double b = std::min(0.0, kLogMin + (best + 1) * step);
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - phi * (b - a), d = a + phi * (b - a);
  double fc = profile(rows, q_at(c)), fd = profile(rows, q_at(d));
  while (b - a > 1e-13) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = profile(rows, q_at(c));
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = profile(rows, q_at(d));
    }
  }
  double q = q_at(0.5 * (a + b));
  double nll = profile(rows, q);
  if (best_val < nll) {
    q = q_at(kLogMin * (1.0 - double(best) / kGrid));
    nll = best_val;
  }
  const double p = best_p(rows, q);

  double saturated = 0.0;
  for (const auto& r : rows) {
    const double f = r.follows / r.groups;
    saturated -= xlogy(r.follows, f) + xlogy(r.groups - r.follows, 1.0 - f);
  }

  // Expected information in (p, q).
  double ipp = 0.0, ipq = 0.0, iqq = 0.0;
  for (const auto& r : rows) {
    const double prob = trf_probability({p, q}, static_cast<std::uint32_t>(r.n));
    if (prob <= 0.0 || prob >= 1.0) continue;
    const double dp = prob / p;
    const double dq = p * r.n * std::pow(1.0 - q, r.n - 1.0);
    const double w = r.groups / (prob * (1.0 - prob));
    ipp += w * dp * dp;
    ipq += w * dp * dq;
    iqq += w * dq * dq;
  }
  const double det = ipp * iqq - ipq * ipq;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double se_p = det > 0.0 ? std::sqrt(iqq / det) : nan;
  const double se_q = det > 0.0 ? std::sqrt(ipp / det) : nan;

  return FitResult{{p, q}, nll, 2.0 * (nll - saturated), rows.size() - 2, se_p, se_q};
}

void write_fit_report_csv(std::ostream& out, std::span<const FitReportRow> rows) {
  out << "class,delta,p,pq,q,nll\n";
  for (const auto& r : rows)
    out << r.cls << ',' << format_number(r.delta) << ',' << format_number(r.p) << ','
        << format_number(r.pq) << ',' << format_number(r.q) << ',' << format_number(r.nll) << '\n';
}

namespace {

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// log(1 + e^x) without overflow.
double softplus(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

}  // namespace

LogisticModel logistic_fit(const Eigen::MatrixXd& features, const Eigen::VectorXd& labels) {
  const auto rows = features.rows();
  const auto k = features.cols();
  if (labels.size() != rows)
    throw Error(Errc::malformed_record, "label count does not match feature rows");
  for (Eigen::Index i = 0; i < rows; ++i)
    if (labels[i] != 0.0 && labels[i] != 1.0)
      throw Error(Errc::malformed_record, "labels must be 0 or 1");
  if (rows < k + 1)
    throw Error(Errc::rank_deficient, "need at least " + std::to_string(k + 1) + " rows");
  for (Eigen::Index j = 0; j < k; ++j)
    if (features.col(j).maxCoeff() == features.col(j).minCoeff())
      throw Error(Errc::rank_deficient, "feature column " + std::to_string(j) + " is constant");

  Eigen::MatrixXd x(rows, k + 1);
  x.col(0).setOnes();
  x.rightCols(k) = features;
  if (Eigen::ColPivHouseholderQR<Eigen::MatrixXd>(x).rank() < k + 1)
    throw Error(Errc::rank_deficient, "feature columns are collinear");

  LogisticModel m;
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(k + 1);
  Eigen::VectorXd mu(rows), w(rows);
  Eigen::MatrixXd h(k + 1, k + 1);
  auto refresh = [&] {
    const Eigen::VectorXd eta = x * beta;
    for (Eigen::Index i = 0; i < rows; ++i) {
      mu[i] = sigmoid(eta[i]);
      w[i] = mu[i] * (1.0 - mu[i]);
    }
    h = x.transpose() * w.asDiagonal() * x;
    return Eigen::VectorXd(x.transpose() * (labels - mu));
  };

  for (m.iterations = 0; m.iterations < 100; ++m.iterations) {
    const Eigen::VectorXd grad = refresh();
    const bool done = grad.norm() < 1e-8;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(h);
    const Eigen::VectorXd step = ldlt.solve(grad);
    if (ldlt.info() != Eigen::Success || !step.allFinite())
      throw Error(Errc::separable, "information matrix became singular; the data look separable");
    beta += step;
    if (done) {
      // One more Newton step past the tolerance is nearly free and squares
      // the remaining error.
      refresh();
      m.converged = true;
      ++m.iterations;
      break;
    }
    if (beta.cwiseAbs().maxCoeff() > 30.0)
      throw Error(Errc::separable, "coefficient magnitude passed 30; the data look separable");
    // Once the step is at the resolution of beta the gradient cannot shrink
    // further in floating point.
    if (step.norm() <= 1e-13 * (1.0 + beta.norm())) {
      refresh();
      m.converged = true;
      ++m.iterations;
      break;
    }
  }
  if (!m.converged) refresh();

  m.coefficients = beta;
  const Eigen::MatrixXd cov = h.ldlt().solve(Eigen::MatrixXd::Identity(k + 1, k + 1));
  m.standard_errors = cov.diagonal().cwiseMax(0.0).cwiseSqrt();
  const Eigen::VectorXd eta = x * beta;
  double ll = 0.0;
  for (Eigen::Index i = 0; i < rows; ++i) ll += labels[i] * eta[i] - softplus(eta[i]);
  m.log_likelihood = ll;
  return m;
}

std::vector<OddsRow> odds_ratios(const LogisticModel& model, std::span<const std::string> names,
                                 double confidence) {
  if (!model.converged) throw Error(Errc::not_converged, "logistic fit did not converge");
  if (static_cast<Eigen::Index>(names.size()) + 1 != model.coefficients.size())
    throw Error(Errc::invalid_config, "factor names do not match the model's features");
  if (!(confidence > 0.0 && confidence < 1.0))
    throw Error(Errc::invalid_config, "confidence must lie in (0, 1)");
  const boost::math::normal_distribution<double> normal;
  const double z = boost::math::quantile(normal, 0.5 + 0.5 * confidence);

  std::vector<OddsRow> out;
  for (std::size_t i = 0; i < names.size(); ++i) {
    const double k = model.coefficients[i + 1];
    const double se = model.standard_errors[i + 1];
    OddsRow r{names[i], std::exp(k), std::exp(k), std::exp(k), 0.0, se == 0.0};
    if (r.degenerate) {
      r.p_value = k == 0.0 ? 1.0 : 0.0;
    } else {
      r.ci_low = std::exp(k - z * se);
      r.ci_high = std::exp(k + z * se);
      r.p_value = std::erfc(std::abs(k / se) / std::sqrt(2.0));
    }
    out.push_back(r);
  }
  return out;
}

void write_odds_csv(std::ostream& out, std::span<const OddsRow> rows) {
  out << "factor,odds_ratio,ci_low,ci_high,p_value\n";
  for (const auto& r : rows)
    out << r.factor << ',' << format_number(r.odds_ratio) << ',' << format_number(r.ci_low) << ','
        << format_number(r.ci_high) << ',' << format_number(r.p_value) << '\n';
}

}  // namespace trf
