#include "imufresh/fresh.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <set>

#include "imufresh/error.hpp"
#include "imufresh/parallel.hpp"
#include "imufresh/text.hpp"

namespace imufresh {

std::string_view to_string(TestKind kind) noexcept {
  switch (kind) {
    case TestKind::fisher_exact: return "fisher_exact";
    case TestKind::ks_two_sample: return "ks_two_sample";
    case TestKind::kendall_tau: return "kendall_tau";
  }
  return "?";
}

std::string_view to_string(FdrMethod method) noexcept {
  return method == FdrMethod::benjamini_yekutieli ? "by" : "bh";
}

std::vector<std::string> SelectionReport::selected_strings() const {
  std::vector<std::string> out;
  out.reserve(selected.size());
  for (const auto& name : selected) out.push_back(encode_feature_name(name));
  return out;
}

bool is_binary(std::span<const double> values) {
  bool seen_any = false;
  double first = 0.0;
  double second = 0.0;
  bool has_second = false;
  for (const double v : values) {
    if (std::isnan(v)) continue;
    if (!seen_any) {
      first = v;
      seen_any = true;
    } else if (v != first) {
      if (!has_second) {
        second = v;
        has_second = true;
      } else if (v != second) {
        return false;
      }
    }
  }
  if (!seen_any) throw Error(ErrorCode::DegenerateFeature, "all values are NaN");
  return true;
}

// ---------------------------------------------------------------------------
// Fisher

double fisher_exact_test(const ContingencyTable& table) {
  const long long a = table[0][0], b = table[0][1], c = table[1][0], d = table[1][1];
  if (a < 0 || b < 0 || c < 0 || d < 0) throw Error(ErrorCode::DegenerateTable, "negative count");
  const long long row1 = a + b, row2 = c + d, col1 = a + c, col2 = b + d;
  if (row1 == 0 || row2 == 0 || col1 == 0 || col2 == 0) throw Error(ErrorCode::DegenerateTable, "zero margin");
  const long long n = row1 + row2;

  auto log_choose = [](long long nn, long long k) {
    return std::lgamma(static_cast<double>(nn) + 1.0) - std::lgamma(static_cast<double>(k) + 1.0) -
           std::lgamma(static_cast<double>(nn - k) + 1.0);
  };
  const double log_total = log_choose(n, row1);
  auto prob = [&](long long x) { return std::exp(log_choose(col1, x) + log_choose(col2, row1 - x) - log_total); };

  const double observed = prob(a);
  const long long lo = std::max(0LL, row1 - col2);
  const long long hi = std::min(row1, col1);
  double p = 0.0;
  for (long long x = lo; x <= hi; ++x) {
    const double px = prob(x);
    if (px <= observed * (1.0 + 1e-12)) p += px;
  }
  return std::clamp(p, 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// Kolmogorov-Smirnov

double kolmogorov_survival(double lambda) {
  if (!(lambda > 1e-3)) return 1.0;
  const double two_l2 = -2.0 * lambda * lambda;
  double sum = 0.0;
  double sign = 1.0;
  for (int j = 1; j < 1'000'000; ++j) {
    const double term = 2.0 * sign * std::exp(two_l2 * static_cast<double>(j) * static_cast<double>(j));
    sum += term;
    if (std::abs(term) < 1e-10) break;
    sign = -sign;
  }
  return std::clamp(sum, 0.0, 1.0);
}

KsResult ks_two_sample_test(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw Error(ErrorCode::DegenerateSplit, "KS test needs two non-empty samples");
  std::vector<double> sa(a.begin(), a.end());
  std::vector<double> sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  const auto na = static_cast<double>(sa.size());
  const auto nb = static_cast<double>(sb.size());

  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < sa.size() && j < sb.size()) {
    const double v = std::min(sa[i], sb[j]);
    while (i < sa.size() && sa[i] == v) ++i;
    while (j < sb.size() && sb[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }

  const double ne = na * nb / (na + nb);
  const double root = std::sqrt(ne);
  const double lambda = (root + 0.12 + 0.11 / root) * d;
  return {d, kolmogorov_survival(lambda)};
}

// ---------------------------------------------------------------------------
// Kendall

namespace {

struct TieSums {
  double pairs = 0.0;  // sum t(t-1)/2
  double v = 0.0;      // sum t(t-1)(2t+5)
  double t2 = 0.0;     // sum t(t-1)
  double t3 = 0.0;     // sum t(t-1)(t-2)

  void add(double t) {
    pairs += t * (t - 1.0) / 2.0;
    v += t * (t - 1.0) * (2.0 * t + 5.0);
    t2 += t * (t - 1.0);
    t3 += t * (t - 1.0) * (t - 2.0);
  }
};

template <typename Key>
TieSums tie_sums(std::span<const std::pair<double, double>> sorted, Key key) {
  TieSums sums;
  std::size_t run = 1;
  for (std::size_t i = 1; i <= sorted.size(); ++i) {
    if (i < sorted.size() && key(sorted[i]) == key(sorted[i - 1])) {
      ++run;
    } else {
      if (run > 1) sums.add(static_cast<double>(run));
      run = 1;
    }
  }
  return sums;
}

// Sorts `v` by .second and returns the number of inversions.
long long merge_count(std::vector<std::pair<double, double>>& v) {
  long long swaps = 0;
  std::vector<std::pair<double, double>> buf(v.size());
  for (std::size_t width = 1; width < v.size(); width *= 2) {
    for (std::size_t lo = 0; lo < v.size(); lo += 2 * width) {
      const std::size_t mid = std::min(lo + width, v.size());
      const std::size_t hi = std::min(lo + 2 * width, v.size());
      std::size_t i = lo, j = mid, k = lo;
      while (i < mid && j < hi) {
        if (v[j].second < v[i].second) {
          swaps += static_cast<long long>(mid - i);
          buf[k++] = v[j++];
        } else {
          buf[k++] = v[i++];
        }
      }
      while (i < mid) buf[k++] = v[i++];
      while (j < hi) buf[k++] = v[j++];
    }
    std::copy(buf.begin(), buf.end(), v.begin());
  }
  return swaps;
}

}  // namespace

KendallResult kendall_tau_test(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error(ErrorCode::ShapeMismatch, "Kendall tau needs equal lengths");
  const std::size_t n = x.size();
  if (n < 3) throw Error(ErrorCode::BadParameters, "Kendall tau needs n >= 3");

  std::vector<std::pair<double, double>> pairs(n);
  for (std::size_t i = 0; i < n; ++i) pairs[i] = {x[i], y[i]};
  std::sort(pairs.begin(), pairs.end());

  const TieSums x_ties = tie_sums(std::span<const std::pair<double, double>>(pairs), [](const auto& p) { return p.first; });
  const TieSums joint_ties = tie_sums(std::span<const std::pair<double, double>>(pairs), [](const auto& p) { return p; });
  const long long swaps = merge_count(pairs);
  const TieSums y_ties = tie_sums(std::span<const std::pair<double, double>>(pairs), [](const auto& p) { return p.second; });

  const double nd = static_cast<double>(n);
  const double n0 = nd * (nd - 1.0) / 2.0;
  if (x_ties.pairs == n0 || y_ties.pairs == n0) {
    throw Error(ErrorCode::DegenerateFeature, "Kendall tau undefined for a constant input");
  }
  const double s = n0 - x_ties.pairs - y_ties.pairs + joint_ties.pairs - 2.0 * static_cast<double>(swaps);

  KendallResult result;
  result.s = std::llround(s);
  result.tau = s / std::sqrt((n0 - x_ties.pairs) * (n0 - y_ties.pairs));

  const double var_s = (nd * (nd - 1.0) * (2.0 * nd + 5.0) - x_ties.v - y_ties.v) / 18.0 +
                       x_ties.t2 * y_ties.t2 / (2.0 * nd * (nd - 1.0)) +
                       x_ties.t3 * y_ties.t3 / (9.0 * nd * (nd - 1.0) * (nd - 2.0));
  if (var_s <= 0.0) {
    result.p_value = 1.0;
    return result;
  }
  result.z = s / std::sqrt(var_s);
  result.p_value = std::clamp(std::erfc(std::abs(result.z) / std::sqrt(2.0)), 0.0, 1.0);
  return result;
}

// ---------------------------------------------------------------------------
// FDR

namespace {

std::pair<std::vector<std::size_t>, std::size_t> step_up(std::span<const double> p, double q, double correction) {
  const std::size_t m = p.size();
  if (m == 0) return {{}, 0};
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return p[a] < p[b]; });

  std::size_t k_star = 0;
  for (std::size_t k = 1; k <= m; ++k) {
    const double threshold = static_cast<double>(k) * q / (static_cast<double>(m) * correction);
    if (p[order[k - 1]] <= threshold) k_star = k;
  }
  std::vector<std::size_t> selected;
  if (k_star > 0) {
    const double cutoff = p[order[k_star - 1]];
    for (std::size_t i = 0; i < m; ++i) {
      if (p[i] <= cutoff) selected.push_back(i);
    }
  }
  return {selected, k_star};
}

double harmonic(std::size_t m) {
  double c = 0.0;
  for (std::size_t i = 1; i <= m; ++i) c += 1.0 / static_cast<double>(i);
  return c;
}

}  // namespace

std::vector<std::size_t> benjamini_yekutieli(std::span<const double> p_values, double q) {
  return step_up(p_values, q, harmonic(p_values.size())).first;
}

std::vector<std::size_t> benjamini_hochberg(std::span<const double> p_values, double q) {
  return step_up(p_values, q, 1.0).first;
}

// ---------------------------------------------------------------------------
// Target

Target Target::categorical(std::vector<std::string> labels) {
  Target t;
  t.size_ = labels.size();
  const std::set<std::string> classes(labels.begin(), labels.end());
  const std::vector<std::string> ordered(classes.begin(), classes.end());
  auto indicator = [&](const std::string& cls) {
    std::vector<double> v(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) v[i] = labels[i] == cls ? 1.0 : 0.0;
    return v;
  };
  if (ordered.size() == 2) {
    t.indicators_.push_back(indicator(ordered[1]));
  } else if (ordered.size() > 2) {
    for (const auto& cls : ordered) t.indicators_.push_back(indicator(cls));
  }
  return t;
}

Target Target::real(std::vector<double> values) {
  Target t;
  t.size_ = values.size();
  std::set<double> distinct(values.begin(), values.end());
  if (distinct.size() == 2) {
    const double upper = *distinct.rbegin();
    std::vector<double> v(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) v[i] = values[i] == upper ? 1.0 : 0.0;
    t.indicators_.push_back(std::move(v));
  } else if (distinct.size() > 2) {
    t.is_real_ = true;
    t.values_ = std::move(values);
  }
  return t;
}

// ---------------------------------------------------------------------------
// Selection

namespace {

struct ColumnTest {
  TestKind kind = TestKind::fisher_exact;
  double p = 1.0;
  std::size_t n = 0;
};

ColumnTest test_against_binary(std::span<const double> feature, std::span<const double> indicator) {
  std::vector<double> f, t;
  for (std::size_t i = 0; i < feature.size(); ++i) {
    if (std::isnan(feature[i])) continue;
    f.push_back(feature[i]);
    t.push_back(indicator[i]);
  }
  ColumnTest result;
  result.n = f.size();
  if (f.empty()) return result;
  if (is_binary(f)) {
    result.kind = TestKind::fisher_exact;
    const double low = *std::min_element(f.begin(), f.end());
    ContingencyTable table{};
    for (std::size_t i = 0; i < f.size(); ++i) table[f[i] == low ? 0 : 1][t[i] > 0.5 ? 1 : 0]++;
    try {
      result.p = fisher_exact_test(table);
    } catch (const Error&) {
      result.p = 1.0;
    }
    return result;
  }
  result.kind = TestKind::ks_two_sample;
  std::vector<double> group0, group1;
  for (std::size_t i = 0; i < f.size(); ++i) (t[i] > 0.5 ? group1 : group0).push_back(f[i]);
  if (group0.empty() || group1.empty()) return result;
  result.p = ks_two_sample_test(group0, group1).p_value;
  return result;
}

ColumnTest test_against_real(std::span<const double> feature, std::span<const double> target) {
  std::vector<double> f, t;
  for (std::size_t i = 0; i < feature.size(); ++i) {
    if (std::isnan(feature[i])) continue;
    f.push_back(feature[i]);
    t.push_back(target[i]);
  }
  ColumnTest result;
  result.n = f.size();
  if (f.empty()) return result;
  if (is_binary(f)) {
    result.kind = TestKind::ks_two_sample;
    const double low = *std::min_element(f.begin(), f.end());
    std::vector<double> group0, group1;
    for (std::size_t i = 0; i < f.size(); ++i) (f[i] == low ? group0 : group1).push_back(t[i]);
    if (group0.empty() || group1.empty()) return result;
    result.p = ks_two_sample_test(group0, group1).p_value;
    return result;
  }
  result.kind = TestKind::kendall_tau;
  if (f.size() < 3) return result;
  try {
    result.p = kendall_tau_test(f, t).p_value;
  } catch (const Error&) {
    result.p = 1.0;
  }
  return result;
}

}  // namespace

SelectionReport select_features(const FeatureMatrix& matrix, const Target& target, double q, FdrMethod method,
                                std::size_t workers) {
  if (!(q > 0.0 && q < 1.0)) throw Error(ErrorCode::BadParameters, "q must lie in (0, 1)");
  if (matrix.rows() < 2) throw Error(ErrorCode::BadParameters, "selection needs at least 2 rows");
  if (target.size() != matrix.rows()) throw Error(ErrorCode::ShapeMismatch, "target length differs from row count");
  if (!target.is_real() && target.indicators().empty()) {
    throw Error(ErrorCode::DegenerateTarget, "target is constant");
  }

  const std::size_t cols = matrix.cols();
  const std::size_t passes = target.is_real() ? 1 : target.indicators().size();
  // tests[pass][column]
  std::vector<std::vector<ColumnTest>> tests(passes, std::vector<ColumnTest>(cols));
  parallel_for(cols, workers, [&](std::size_t c) {
    const auto column = matrix.column(c);
    for (std::size_t pass = 0; pass < passes; ++pass) {
      tests[pass][c] = target.is_real() ? test_against_real(column, target.values())
                                        : test_against_binary(column, target.indicators()[pass]);
    }
  });

  SelectionReport report;
  report.q = q;
  report.method = method;
  std::vector<bool> keep(cols, false);
  const double correction = method == FdrMethod::benjamini_yekutieli ? harmonic(cols) : 1.0;
  for (std::size_t pass = 0; pass < passes; ++pass) {
    std::vector<double> p(cols);
    for (std::size_t c = 0; c < cols; ++c) p[c] = tests[pass][c].p;
    const auto [selected, k_star] = step_up(p, q, correction);
    for (const auto idx : selected) keep[idx] = true;
    report.threshold_rank = std::max(report.threshold_rank, k_star);
  }

  std::vector<std::size_t> order(cols);
  std::iota(order.begin(), order.end(), 0);
  std::vector<ColumnTest> best(cols);
  for (std::size_t c = 0; c < cols; ++c) {
    best[c] = tests[0][c];
    for (std::size_t pass = 1; pass < passes; ++pass) {
      if (tests[pass][c].p < best[c].p) best[c] = tests[pass][c];
    }
  }
  // Columns are already in canonical order, so a stable sort breaks p ties by name.
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return best[a].p < best[b].p; });
  for (const auto c : order) {
    report.tests.push_back({matrix.column_names()[c], best[c].kind, best[c].p, best[c].n});
    if (keep[c]) report.selected.push_back(matrix.column_names()[c]);
  }
  return report;
}

void write_selection_report_csv(const SelectionReport& report, std::ostream& out) {
  std::set<std::string> selected;
  for (const auto& name : report.selected) selected.insert(encode_feature_name(name));
  out << "feature,p_value,test_kind,selected\n";
  for (const auto& test : report.tests) {
    const std::string name = encode_feature_name(test.feature_name);
    out << name << ',' << format_double(test.p_value) << ',' << to_string(test.test_kind) << ','
        << (selected.contains(name) ? "true" : "false") << '\n';
  }
}

}  // namespace imufresh
