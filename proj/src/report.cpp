#include "cpoly/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace cpoly::report {

namespace {
constexpr double kPi = 3.14159265358979323846;

double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * kPi); }
}  // namespace

std::string clt_histogram_csv(const std::vector<double>& sample, int bins) {
  if (sample.empty()) throw std::runtime_error("empty sample");
  if (bins < 1) throw std::runtime_error("bins must be >= 1");
  double mean = 0.0;
  for (double x : sample) mean += x;
  mean /= static_cast<double>(sample.size());
  double var = 0.0;
  for (double x : sample) var += (x - mean) * (x - mean);
  var /= std::max<size_t>(1, sample.size() - 1);
  const double sd = std::sqrt(std::max(var, 1e-300));

  std::vector<double> z(sample.size());
  for (size_t i = 0; i < sample.size(); ++i) z[i] = (sample[i] - mean) / sd;
  const auto [lo_it, hi_it] = std::minmax_element(z.begin(), z.end());
  const double lo = *lo_it - 1e-9, hi = *hi_it + 1e-9;
  const double w = (hi - lo) / bins;

  std::vector<uint64_t> count(bins, 0);
  for (double x : z) {
    int b = static_cast<int>((x - lo) / w);
    b = std::clamp(b, 0, bins - 1);
    ++count[b];
  }

  std::string out = "bin_left,bin_right,density,reference_density\n";
  char line[128];
  for (int b = 0; b < bins; ++b) {
    const double l = lo + b * w, r = l + w;
    const double density = static_cast<double>(count[b]) / (sample.size() * w);
    std::snprintf(line, sizeof line, "%.12g,%.12g,%.12g,%.12g\n", l, r, density,
                  normal_pdf(0.5 * (l + r)));
    out += line;
  }
  return out;
}

std::string histogram_from_summary(const nlohmann::json& summary, const std::string& obs,
                                   const std::string& n, int bins) {
  if (!summary.contains("samples"))
    throw std::runtime_error("summary was written without samples");
  const auto& samples = summary.at("samples");
  if (!samples.contains(obs)) throw std::runtime_error("no samples for observable " + obs);
  if (!samples.at(obs).contains(n)) throw std::runtime_error("no samples at n=" + n);
  return clt_histogram_csv(samples.at(obs).at(n).get<std::vector<double>>(), bins);
}

std::string variance_curve_csv(const nlohmann::json& summary, const std::string& obs) {
  const auto& table = summary.at("observables").at(obs);
  std::vector<std::pair<uint64_t, nlohmann::json>> rows;
  for (auto it = table.begin(); it != table.end(); ++it)
    rows.emplace_back(std::stoull(it.key()), it.value());
  std::sort(rows.begin(), rows.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  std::string out = "n,count,mean,var,var_per_n,var_per_nlogn,var_per_n32\n";
  char line[192];
  for (const auto& [n, e] : rows) {
    const double nd = static_cast<double>(n);
    const double var = e.at("var").get<double>();
    std::snprintf(line, sizeof line, "%llu,%llu,%.12g,%.12g,%.12g,%.12g,%.12g\n",
                  static_cast<unsigned long long>(n),
                  static_cast<unsigned long long>(e.at("count").get<uint64_t>()),
                  e.at("mean").get<double>(), var, var / nd, var / (nd * std::log(nd)),
                  var / std::pow(nd, 1.5));
    out += line;
  }
  return out;
}

}  // namespace cpoly::report
