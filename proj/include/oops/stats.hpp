#pragma once

#include <vector>

namespace oops {

double mean(const std::vector<double>& xs);
// Population standard deviation (divides by n).
double stddev(const std::vector<double>& xs);

// 1-based ranks; tied values share the average of their ranks.
std::vector<double> average_ranks(const std::vector<double>& xs);

// 0 when either input has zero variance.
double pearson(const std::vector<double>& x, const std::vector<double>& y);
double spearman(const std::vector<double>& x, const std::vector<double>& y);

// Return relative to the expert's: 1 at the expert, 0 at zero return for a
// positive-return expert, and 1 - |R - R_E| / |R_E| below the expert when the
// expert return is negative. Equals R / R_E whenever R_E > 0.
double normalized_score(double learner_return, double expert_return);

}  // namespace oops
