#pragma once

// Straightforward reference implementations used as test oracles. They follow
// the textbook definitions directly (sorting by copy, O(n^2) pair loops,
// exact integer arithmetic) and share no code with the library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

namespace oracle {

inline double quantile(std::vector<double> x, double q) {
  std::sort(x.begin(), x.end());
  const double pos = (static_cast<double>(x.size()) - 1.0) * q;
  const double lo = std::floor(pos);
  const double hi = std::ceil(pos);
  const double vlo = x[static_cast<std::size_t>(lo)];
  const double vhi = x[static_cast<std::size_t>(hi)];
  return vlo + (pos - lo) * (vhi - vlo);
}

inline double change_quantiles(const std::vector<double>& x, double ql, double qh, bool isabs,
                               const std::string& f_agg) {
  const double lo = quantile(x, ql);
  const double hi = quantile(x, qh);
  std::vector<double> kept;
  for (std::size_t t = 0; t + 1 < x.size(); ++t) {
    const bool inside = lo <= x[t] && x[t] <= hi && lo <= x[t + 1] && x[t + 1] <= hi;
    if (!inside) continue;
    const double d = x[t + 1] - x[t];
    kept.push_back(isabs ? std::fabs(d) : d);
  }
  if (kept.empty()) return 0.0;
  double mean = 0.0;
  for (double d : kept) mean += d;
  mean /= static_cast<double>(kept.size());
  if (f_agg == "mean") return mean;
  double var = 0.0;
  for (double d : kept) var += (d - mean) * (d - mean);
  return var / static_cast<double>(kept.size());
}

/// Least squares via the normal equations on (1, t).
inline double line_attr(const std::vector<double>& y, const std::string& attr) {
  const double n = static_cast<double>(y.size());
  double st = 0, sy = 0, stt = 0, sty = 0, syy = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double t = static_cast<double>(i);
    st += t;
    sy += y[i];
    stt += t * t;
    sty += t * y[i];
    syy += y[i] * y[i];
  }
  const double det = n * stt - st * st;
  const double slope = (n * sty - st * sy) / det;
  const double intercept = (sy - slope * st) / n;
  if (attr == "slope") return slope;
  if (attr == "intercept") return intercept;
  if (attr == "stderr") {
    if (y.size() == 2) return 0.0;
    double sse = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      const double r = y[i] - intercept - slope * static_cast<double>(i);
      sse += r * r;
    }
    const double sxx = stt - st * st / n;
    return std::sqrt(sse / (n - 2.0) / sxx);
  }
  // rvalue
  bool constant = std::all_of(y.begin(), y.end(), [&](double v) { return v == y[0]; });
  if (constant) return 0.0;
  const double cov = sty - st * sy / n;
  const double vt = stt - st * st / n;
  const double vy = syy - sy * sy / n;
  return cov / std::sqrt(vt * vy);
}

inline double agg_linear_trend(const std::vector<double>& x, std::size_t chunk_len, const std::string& f_agg,
                               const std::string& attr) {
  std::vector<double> agg;
  for (std::size_t start = 0; start + chunk_len <= x.size(); start += chunk_len) {
    std::vector<double> chunk(x.begin() + static_cast<long>(start), x.begin() + static_cast<long>(start + chunk_len));
    if (f_agg == "max") {
      agg.push_back(*std::max_element(chunk.begin(), chunk.end()));
    } else if (f_agg == "min") {
      agg.push_back(*std::min_element(chunk.begin(), chunk.end()));
    } else {
      double s = 0;
      for (double v : chunk) s += v;
      agg.push_back(s / static_cast<double>(chunk.size()));
    }
  }
  if (agg.size() < 2) return std::nan("");
  return line_attr(agg, attr);
}

/// Exact binomial coefficient; fine for n <= 60.
inline std::uint64_t choose(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  std::uint64_t r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

/// Two-sided Fisher p by enumerating every table with the observed margins,
/// comparing probabilities through exact integer numerators.
inline double fisher(long long a, long long b, long long c, long long d) {
  const long long r1 = a + b, c1 = a + c, c2 = b + d, n = a + b + c + d;
  const std::uint64_t observed = choose(c1, a) * choose(c2, b);
  std::uint64_t mass = 0;
  for (long long x = std::max(0LL, r1 - c2); x <= std::min(r1, c1); ++x) {
    const std::uint64_t w = choose(c1, x) * choose(c2, r1 - x);
    if (w <= observed) mass += w;
  }
  return static_cast<double>(mass) / static_cast<double>(choose(n, r1));
}

struct KendallCounts {
  long long concordant = 0;
  long long discordant = 0;
  long long ties_x_only = 0;
  long long ties_y_only = 0;
  double tau_b = 0.0;
};

inline KendallCounts kendall_pairs(const std::vector<double>& x, const std::vector<double>& y) {
  KendallCounts k;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      const double dx = x[i] - x[j];
      const double dy = y[i] - y[j];
      if (dx == 0 && dy == 0) continue;
      if (dx == 0) {
        ++k.ties_x_only;
      } else if (dy == 0) {
        ++k.ties_y_only;
      } else if ((dx > 0) == (dy > 0)) {
        ++k.concordant;
      } else {
        ++k.discordant;
      }
    }
  }
  const double s = static_cast<double>(k.concordant - k.discordant);
  const double n1 = static_cast<double>(k.concordant + k.discordant + k.ties_x_only);
  const double n2 = static_cast<double>(k.concordant + k.discordant + k.ties_y_only);
  k.tau_b = s / std::sqrt(n1 * n2);
  return k;
}

/// Kolmogorov survival series in long double, summed until terms vanish.
inline double kolmogorov_series(double lambda) {
  long double sum = 0.0L;
  for (int j = 1; j < 200000; ++j) {
    const long double term = 2.0L * ((j % 2 == 1) ? 1.0L : -1.0L) *
                             std::exp(-2.0L * j * j * static_cast<long double>(lambda) * lambda);
    sum += term;
    if (std::fabs(term) < 1e-22L) break;
  }
  return static_cast<double>(std::clamp(sum, 0.0L, 1.0L));
}

/// D by evaluating both ECDFs at every pooled point.
inline double ks_statistic(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> pooled = a;
  pooled.insert(pooled.end(), b.begin(), b.end());
  double d = 0.0;
  for (double v : pooled) {
    const double fa = static_cast<double>(std::count_if(a.begin(), a.end(), [&](double u) { return u <= v; })) / static_cast<double>(a.size());
    const double fb = static_cast<double>(std::count_if(b.begin(), b.end(), [&](double u) { return u <= v; })) / static_cast<double>(b.size());
    d = std::max(d, std::fabs(fa - fb));
  }
  return d;
}

inline double ks_pvalue(const std::vector<double>& a, const std::vector<double>& b) {
  const double d = ks_statistic(a, b);
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  const double ne = na * nb / (na + nb);
  const double lambda = (std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne)) * d;
  if (lambda < 0.05) return 1.0;  // series is 1 to double precision below this
  return kolmogorov_series(lambda);
}

/// Direct transcription of the step-up rule with an explicit correction.
inline std::vector<std::size_t> step_up(const std::vector<double>& p, double q, bool yekutieli) {
  const std::size_t m = p.size();
  double c = 1.0;
  if (yekutieli) {
    c = 0.0;
    for (std::size_t i = 1; i <= m; ++i) c += 1.0 / static_cast<double>(i);
  }
  std::vector<double> sorted = p;
  std::sort(sorted.begin(), sorted.end());
  double cutoff = -1.0;
  for (std::size_t k = 1; k <= m; ++k) {
    if (sorted[k - 1] <= static_cast<double>(k) * q / (static_cast<double>(m) * c)) cutoff = sorted[k - 1];
  }
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < m; ++i) {
    if (p[i] <= cutoff) out.push_back(i);
  }
  return out;
}

}  // namespace oracle
