#pragma once

#include <vector>

// Small statistical helpers for the randomness and indistinguishability
// checks: chi-squared tail probabilities via the regularized incomplete
// gamma function, plus a bit-frequency test.

namespace qfhe::stats {

// Regularized upper incomplete gamma Q(a, x) = Gamma(a, x) / Gamma(a).
double gammq(double a, double x);

// P(X > stat) for a chi-squared variable with `dof` degrees of freedom.
double chi_squared_pvalue(double stat, int dof);

// Pearson test of ones ~ Binomial(n, 1/2); returns the p-value.
double frequency_test_pvalue(long ones, long total);

// Homogeneity of per-group success rates (2 x k contingency table).
// groups[i] = {successes, trials}. Returns the p-value with k-1 dof.
double homogeneity_pvalue(const std::vector<std::pair<long, long>>& groups);

}  // namespace qfhe::stats
