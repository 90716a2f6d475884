#include "qfhe/stats.hpp"

#include <cmath>
#include <stdexcept>

namespace qfhe::stats {

namespace {

// series representation, converges fast for x < a + 1
double gamma_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int n = 0; n < 500; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * 1e-15) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// continued fraction, converges fast for x >= a + 1
double gamma_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 500; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-15) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double gammq(double a, double x) {
    if (x < 0 || a <= 0) throw std::invalid_argument("gammq domain error");
    if (x == 0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_series(a, x);
    return gamma_cf(a, x);
}

double chi_squared_pvalue(double stat, int dof) {
    if (dof < 1) throw std::invalid_argument("chi-squared needs dof >= 1");
    if (stat <= 0) return 1.0;
    return gammq(dof / 2.0, stat / 2.0);
}

double frequency_test_pvalue(long ones, long total) {
    if (total <= 0 || ones < 0 || ones > total)
        throw std::invalid_argument("invalid frequency test counts");
    const double expected = total / 2.0;
    const double zeros = static_cast<double>(total - ones);
    const double stat = (ones - expected) * (ones - expected) / expected +
                        (zeros - expected) * (zeros - expected) / expected;
    return chi_squared_pvalue(stat, 1);
}

double homogeneity_pvalue(const std::vector<std::pair<long, long>>& groups) {
    if (groups.size() < 2) throw std::invalid_argument("homogeneity needs >= 2 groups");
    long total_s = 0, total_n = 0;
    for (const auto& [s, n] : groups) {
        if (n <= 0 || s < 0 || s > n) throw std::invalid_argument("invalid group counts");
        total_s += s;
        total_n += n;
    }
    const double rate = static_cast<double>(total_s) / static_cast<double>(total_n);
    if (rate <= 0.0 || rate >= 1.0) return 1.0;  // degenerate table carries no signal
    double stat = 0;
    for (const auto& [s, n] : groups) {
        const double e1 = rate * n;
        const double e0 = (1.0 - rate) * n;
        const double d1 = s - e1;
        const double d0 = (n - s) - e0;
        stat += d1 * d1 / e1 + d0 * d0 / e0;
    }
    return chi_squared_pvalue(stat, static_cast<int>(groups.size()) - 1);
}

}  // namespace qfhe::stats
