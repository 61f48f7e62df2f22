#ifndef AEPLAB_SELFTEST_HPP
#define AEPLAB_SELFTEST_HPP

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace aeplab {

// Independent reference implementations ("oracles") used to cross-check the
// main code paths.  Everything here is deliberately written from scratch
// against the defining formulas — combinatorics and plain loops — and shares
// no spectral or chain machinery with the library proper.
namespace oracle {

// Eigenvalue classes of the n-fold product of diag(p, 1-p): probability
// p^j (1-p)^(n-j) with multiplicity C(n, j).
struct BinomialClass {
    double prob = 0.0;
    std::size_t multiplicity = 0;
};

std::vector<BinomialClass> binomial_classes(double p, std::size_t n);

// Total mass and dimension of the eigenvalue window [lo, hi].
struct WindowCount {
    double mass = 0.0;
    std::size_t dim = 0;
};

WindowCount binomial_window(double p, std::size_t n, double lo, double hi);

// Minimal number of largest eigenvalues of the product state whose mass
// reaches 1 - eps.
std::size_t binomial_beta_count(double p, std::size_t n, double eps);

// Minimal support size with mass >= 1 - eps, by exhaustive subset search
// (requires probs.size() <= 20).
std::size_t exhaustive_alpha_count(std::span<const double> probs, double eps);

// Stationary word probabilities by direct enumeration of all d^m words.
std::vector<double> word_probabilities(const std::vector<std::vector<double>>& transition,
                                       const std::vector<double>& start, std::size_t m);

// Mutually-reachable classes of a directed graph via Warshall closure.
std::vector<std::vector<std::size_t>> closure_classes(
    const std::vector<std::vector<bool>>& adjacency);

// gcd of the return-walk lengths of state 0 (walk lengths up to max_len).
std::size_t return_time_gcd(const std::vector<std::vector<double>>& transition,
                            std::size_t max_len);

}  // namespace oracle

// One named consistency suite of the built-in selftest.
struct SelftestResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

// Cross-checks of the library against the oracles above.  All suites run
// regardless of earlier failures.
std::vector<SelftestResult> run_selftests();

}  // namespace aeplab

#endif
