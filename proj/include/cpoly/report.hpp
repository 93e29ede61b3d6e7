#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace cpoly::report {

// Histogram of the studentized sample with a standard-normal reference
// column. Columns: bin_left,bin_right,density,reference_density.
// Densities integrate to 1 over the binned range.
std::string clt_histogram_csv(const std::vector<double>& sample, int bins);

// Histogram for one (observable, n) pair of a summary produced with samples.
std::string histogram_from_summary(const nlohmann::json& summary, const std::string& obs,
                                   const std::string& n, int bins);

// One row per checkpoint: n,count,mean,var,var_per_n,var_per_nlogn,var_per_n32.
std::string variance_curve_csv(const nlohmann::json& summary, const std::string& obs);

}  // namespace cpoly::report
