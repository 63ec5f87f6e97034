#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "trf/detector.hpp"
#include "trf/simulator.hpp"

namespace trf {

// p * (1 - (1 - q)^n): chance that a group of n retweets ends in a follow.
double trf_probability(const TrfModelParams& params, std::uint32_t n);

struct FitRow {
  std::uint32_t n;
  std::uint64_t groups;
  std::uint64_t follows;
};

// Rows of a per-n estimate table; the pooled n = 0 row is dropped.
std::vector<FitRow> fit_rows(std::span<const PTrfRow> table);

struct FitResult {
  TrfModelParams params;
  double nll;       // negative binomial log-likelihood at the optimum
  double deviance;  // against the saturated per-row model
  std::size_t dof;  // rows - 2
  double se_p;      // from the expected information; NaN when singular
  double se_q;
};

// Binomial maximum likelihood over rows. Throws Errc::underdetermined with
// fewer than two populated n values and Errc::all_zero_successes when no row
// has a follow.
FitResult fit_pq(std::span<const FitRow> rows);

// Binomial negative log-likelihood of the rows under (p, q).
double fit_nll(std::span<const FitRow> rows, const TrfModelParams& params);

struct FitReportRow {
  std::string cls;
  double delta;
  double p;
  double pq;
  double q;
  double nll;
};

void write_fit_report_csv(std::ostream& out, std::span<const FitReportRow> rows);

struct LogisticModel {
  Eigen::VectorXd coefficients;  // intercept first
  Eigen::VectorXd standard_errors;
  bool converged = false;
  int iterations = 0;
  double log_likelihood = 0.0;
};

// Newton / IRLS for ln(P/(1-P)) = k0 + sum k_i x_i. `features` excludes the
// intercept; labels are 0 or 1.
// Errc::rank_deficient: too few rows, a constant feature column or
// collinear columns. Errc::separable: some |coefficient| passes 30.
LogisticModel logistic_fit(const Eigen::MatrixXd& features, const Eigen::VectorXd& labels);

struct OddsRow {
  std::string factor;
  double odds_ratio;
  double ci_low;
  double ci_high;
  double p_value;      // two-sided Wald
  bool degenerate;     // zero standard error; CI collapses to the point
};

// One row per feature (the intercept is skipped). Throws Errc::not_converged.
std::vector<OddsRow> odds_ratios(const LogisticModel& model, std::span<const std::string> names,
                                 double confidence = 0.95);

void write_odds_csv(std::ostream& out, std::span<const OddsRow> rows);

// Per-group regression inputs, label = i_delta.
struct FactorTable {
  std::vector<std::string> names;
  Eigen::MatrixXd features;
  Eigen::VectorXd labels;
};

// Columns:
//   followers_s    |F(S)| at the group's first retweet
//   followees_s    |F'(S)| at the same instant
//   tweets_s       tweets of S up to then
//   tweet_rate_s   tweets of S per day over the elapsed run, at least delta
//   reciprocity    S followed L at the first retweet
//   tweets_sl      distinct tweets of S among the group's retweets
//   retweets_sl    retweets in the group (n)
//   repeaters_sl   distinct repeaters in the group
FactorTable build_factor_table(std::span<const Event> log, const TemporalDigraph& initial_graph,
                               double delta);

// Keeps the named columns in the given order. Errc::invalid_config on an
// unknown name.
FactorTable select_factors(const FactorTable& table, std::span<const std::string> names);

// Header: factor names then `label`.
void write_factor_table_csv(std::ostream& out, const FactorTable& table);
FactorTable read_factor_table_csv(std::istream& in);

}  // namespace trf
