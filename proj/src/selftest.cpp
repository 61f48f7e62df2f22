#include "aeplab/selftest.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <sstream>

#include "aeplab/aep.hpp"
#include "aeplab/codec.hpp"
#include "aeplab/ergodic.hpp"
#include "aeplab/errors.hpp"
#include "aeplab/linalg.hpp"
#include "aeplab/rng.hpp"
#include "aeplab/source_model.hpp"

namespace aeplab {

// ==== oracles ===============================================================

namespace oracle {

std::vector<BinomialClass> binomial_classes(double p, std::size_t n) {
    if (!(p > 0.0 && p < 1.0)) throw ParameterError("binomial_classes: p must be in (0,1)");
    std::vector<BinomialClass> classes;
    classes.reserve(n + 1);
    unsigned long long choose = 1;  // C(n, j), updated incrementally
    for (std::size_t j = 0; j <= n; ++j) {
        BinomialClass c;
        c.prob = std::pow(p, static_cast<double>(n - j)) * std::pow(1.0 - p, static_cast<double>(j));
        c.multiplicity = choose;
        classes.push_back(c);
        if (j < n) choose = choose * (n - j) / (j + 1);
    }
    return classes;
}

namespace {

std::vector<double> expanded_spectrum(double p, std::size_t n) {
    std::vector<double> all;
    for (const BinomialClass& c : binomial_classes(p, n))
        all.insert(all.end(), c.multiplicity, c.prob);
    std::sort(all.begin(), all.end(), std::greater<double>());
    return all;
}

}  // namespace

WindowCount binomial_window(double p, std::size_t n, double lo, double hi) {
    WindowCount out;
    long double mass = 0.0L;
    for (const BinomialClass& c : binomial_classes(p, n)) {
        if (c.prob >= lo && c.prob <= hi) {
            mass += static_cast<long double>(c.prob) * static_cast<long double>(c.multiplicity);
            out.dim += c.multiplicity;
        }
    }
    out.mass = static_cast<double>(mass);
    return out;
}

std::size_t binomial_beta_count(double p, std::size_t n, double eps) {
    const std::vector<double> all = expanded_spectrum(p, n);
    const long double target = 1.0L - static_cast<long double>(eps);
    long double acc = 0.0L;
    for (std::size_t k = 0; k < all.size(); ++k) {
        acc += all[k];
        if (acc >= target) return k + 1;
    }
    return all.size();
}

std::size_t exhaustive_alpha_count(std::span<const double> probs, double eps) {
    if (probs.size() > 20)
        throw ParameterError("exhaustive_alpha_count: more than 20 atoms");
    // long double accumulation keeps sums of <= 20 doubles exact, so the
    // threshold comparison is decided in real arithmetic even when a subset
    // mass lands exactly on 1 - eps (e.g. 0.4 + 0.3 + 0.2 vs 1 - 0.1).  The
    // target itself is the double-rounded 1 - eps the library compares with.
    const long double target = static_cast<long double>(1.0 - eps);
    const std::size_t total = std::size_t{1} << probs.size();
    std::size_t best = probs.size();
    for (std::size_t mask = 0; mask < total; ++mask) {
        long double m = 0.0L;
        for (std::size_t i = 0; i < probs.size(); ++i)
            if (mask & (std::size_t{1} << i)) m += probs[i];
        if (m >= target) best = std::min<std::size_t>(best, std::popcount(mask));
    }
    return best;
}

std::vector<double> word_probabilities(const std::vector<std::vector<double>>& transition,
                                       const std::vector<double>& start, std::size_t m) {
    const std::size_t d = transition.size();
    std::size_t count = 1;
    for (std::size_t i = 0; i < m; ++i) count *= d;
    std::vector<double> out(count, 0.0);
    for (std::size_t w = 0; w < count; ++w) {
        // Decode digits with site 0 most significant.
        std::vector<std::size_t> digits(m);
        std::size_t rem = w;
        for (std::size_t pos = m; pos-- > 0;) {
            digits[pos] = rem % d;
            rem /= d;
        }
        double prob = m == 0 ? 1.0 : start[digits[0]];
        for (std::size_t t = 0; t + 1 < m; ++t) prob *= transition[digits[t]][digits[t + 1]];
        out[w] = prob;
    }
    return out;
}

std::vector<std::vector<std::size_t>> closure_classes(
    const std::vector<std::vector<bool>>& adjacency) {
    const std::size_t d = adjacency.size();
    std::vector<std::vector<bool>> reach = adjacency;
    for (std::size_t a = 0; a < d; ++a) reach[a][a] = true;
    for (std::size_t via = 0; via < d; ++via)
        for (std::size_t a = 0; a < d; ++a)
            if (reach[a][via])
                for (std::size_t b = 0; b < d; ++b)
                    if (reach[via][b]) reach[a][b] = true;
    std::vector<bool> assigned(d, false);
    std::vector<std::vector<std::size_t>> classes;
    for (std::size_t a = 0; a < d; ++a) {
        if (assigned[a]) continue;
        classes.emplace_back();
        for (std::size_t b = 0; b < d; ++b)
            if (reach[a][b] && reach[b][a]) {
                classes.back().push_back(b);
                assigned[b] = true;
            }
    }
    return classes;
}

std::size_t return_time_gcd(const std::vector<std::vector<double>>& transition,
                            std::size_t max_len) {
    const std::size_t d = transition.size();
    std::vector<bool> v(d, false);
    v[0] = true;
    std::size_t g = 0;
    for (std::size_t len = 1; len <= max_len; ++len) {
        std::vector<bool> next(d, false);
        for (std::size_t a = 0; a < d; ++a)
            if (v[a])
                for (std::size_t b = 0; b < d; ++b)
                    if (transition[a][b] > 0.0) next[b] = true;
        v.swap(next);
        if (v[0]) g = std::gcd(g, len);
    }
    return g;
}

}  // namespace oracle

// ==== selftest suites =======================================================

namespace {

class Check {
public:
    void expect(bool cond, const std::string& msg) {
        if (!cond) {
            ok_ = false;
            if (!failures_.empty()) failures_ += "; ";
            failures_ += msg;
        }
    }

    void expect_near(double got, double want, double tol, const std::string& what) {
        std::ostringstream os;
        os << what << ": got " << got << ", want " << want << " (tol " << tol << ")";
        expect(std::abs(got - want) <= tol, os.str());
    }

    SelftestResult finish(const std::string& name, const std::string& pass_detail) const {
        return SelftestResult{name, ok_, ok_ ? pass_detail : failures_};
    }

private:
    bool ok_ = true;
    std::string failures_;
};

SourceModel iid_09() {
    const double diag[] = {0.9, 0.1};
    return IIDProduct{DensityOperator(ComplexMatrix::diagonal(diag))};
}

std::vector<std::vector<double>> flip_chain_rows() {
    return {{0.8, 0.2}, {0.2, 0.8}};
}

std::vector<std::vector<double>> period_two_rows() {
    return {{0.0, 0.0, 0.7, 0.3},
            {0.0, 0.0, 0.3, 0.7},
            {0.7, 0.3, 0.0, 0.0},
            {0.3, 0.7, 0.0, 0.0}};
}

SelftestResult suite_binomial_window() {
    Check c;
    const SourceModel model = iid_09();
    const double s = mean_entropy(model);
    const std::size_t n = 12;
    const double delta = 0.1, dp = delta / 2.0;
    const BlockState block = block_density(model, n);
    const TypicalProjector proj = typical_projector(block, s, delta);

    const double nd = static_cast<double>(n);
    const oracle::WindowCount ref =
        oracle::binomial_window(0.9, n, std::exp(-nd * (s + dp)), std::exp(-nd * (s - dp)));
    c.expect(proj.selection.size() == ref.dim,
             "window dim: got " + std::to_string(proj.selection.size()) + ", oracle " +
                 std::to_string(ref.dim));
    c.expect_near(proj.mass, ref.mass, 1e-12, "window mass");

    for (double eps : {0.1, 0.01}) {
        const BetaResult b = beta(block, eps);
        const std::size_t ref_count = oracle::binomial_beta_count(0.9, n, eps);
        c.expect(b.count == ref_count, "beta count at eps=" + std::to_string(eps) + ": got " +
                                           std::to_string(b.count) + ", oracle " +
                                           std::to_string(ref_count));
    }
    return c.finish("binomial-window",
                    "n=12 window dim/mass and beta counts match combinatorial oracle");
}

SelftestResult suite_exhaustive_alpha() {
    Check c;
    const std::vector<std::vector<double>> cases = {
        {0.5, 0.25, 0.125, 0.0625, 0.0625},
        {0.4, 0.3, 0.2, 0.1},
        {0.25, 0.25, 0.25, 0.25},
        {0.9, 0.04, 0.03, 0.02, 0.01},
    };
    for (const auto& probs : cases) {
        const EmpiricalDistribution dist = make_distribution(probs);
        for (double eps : {0.3, 0.1, 0.05}) {
            const double a = alpha(dist, eps);
            const std::size_t ref = oracle::exhaustive_alpha_count(probs, eps);
            c.expect_near(a, std::log(static_cast<double>(ref)), 1e-12,
                          "alpha vs exhaustive subsets (eps=" + std::to_string(eps) + ")");
        }
    }
    return c.finish("exhaustive-alpha", "greedy prefix equals exhaustive minimal support");
}

SelftestResult suite_word_enumeration() {
    Check c;
    const auto rows = flip_chain_rows();
    const ClassicalMarkov chain(rows);
    for (std::size_t m = 1; m <= 6; ++m) {
        const std::vector<double> lib = word_probabilities(chain, m);
        const std::vector<double> ref = oracle::word_probabilities(rows, chain.stationary(), m);
        double diff = 0.0;
        for (std::size_t w = 0; w < lib.size(); ++w)
            diff = std::max(diff, std::abs(lib[w] - ref[w]));
        c.expect_near(diff, 0.0, 1e-14, "word probabilities at m=" + std::to_string(m));
        c.expect_near(block_entropy(SourceModel{chain}, m), shannon_entropy(ref), 1e-12,
                      "block entropy vs enumerated words at m=" + std::to_string(m));
    }
    return c.finish("word-enumeration", "markov word distributions match direct enumeration");
}

SelftestResult suite_communicating_classes() {
    Check c;
    const auto rows = period_two_rows();
    const ClassicalMarkov chain(rows);
    const std::size_t d = rows.size();
    c.expect(chain_period(chain) == oracle::return_time_gcd(rows, 4 * d + 4),
             "period differs from return-time gcd");

    for (std::size_t l = 1; l <= 6; ++l) {
        // Exact-length-l walk relation assembled by depth-first search.
        std::vector<std::vector<bool>> walk(d, std::vector<bool>(d, false));
        for (std::size_t a = 0; a < d; ++a) {
            std::vector<std::size_t> frontier{a};
            for (std::size_t step = 0; step < l; ++step) {
                std::vector<bool> mark(d, false);
                for (std::size_t u : frontier)
                    for (std::size_t b = 0; b < d; ++b)
                        if (rows[u][b] > 0.0) mark[b] = true;
                frontier.clear();
                for (std::size_t b = 0; b < d; ++b)
                    if (mark[b]) frontier.push_back(b);
            }
            for (std::size_t b : frontier) walk[a][b] = true;
        }
        const auto ref = oracle::closure_classes(walk);
        const Decomposition dec = ergodic_decompose(chain, l);
        c.expect(dec.k() == ref.size(), "component count at l=" + std::to_string(l) + ": got " +
                                            std::to_string(dec.k()) + ", oracle " +
                                            std::to_string(ref.size()));
    }
    return c.finish("communicating-classes",
                    "components match closure classes of the l-step walk relation");
}

SelftestResult suite_jacobi_reconstruction() {
    Check c;
    CounterRng rng(0x5eed);
    const std::size_t d = 24;
    ComplexMatrix m(d, d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j <= i; ++j) {
            const Complex z(rng.next_double() - 0.5, i == j ? 0.0 : rng.next_double() - 0.5);
            m(i, j) = z;
            m(j, i) = std::conj(z);
        }
    const EigenDecomposition eig = hermitian_eig(m);

    ComplexMatrix rebuilt(d, d);
    for (std::size_t k = 0; k < d; ++k)
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j)
                rebuilt(i, j) += eig.eigenvalues[k] * eig.eigenvectors(i, k) *
                                 std::conj(eig.eigenvectors(j, k));
    c.expect_near(rebuilt.max_abs_diff(m), 0.0, 1e-8, "spectral reconstruction residual");
    c.expect_near(
        (eig.eigenvectors.adjoint() * eig.eigenvectors).max_abs_diff(ComplexMatrix::identity(d)),
        0.0, 1e-10, "eigenvector orthonormality");
    c.expect(std::is_sorted(eig.eigenvalues.begin(), eig.eigenvalues.end(),
                            std::greater<double>()),
             "eigenvalues not sorted descending");
    return c.finish("jacobi-reconstruction", "24x24 random Hermitian reconstructed to 1e-8");
}

SelftestResult suite_codec_roundtrip() {
    Check c;
    const SourceModel model = iid_09();
    const CodecConfig codec = build_codec(model, 8, 0.25, 0.25);
    c.expect(codec.code_dim > 0, "codec has empty typical subspace");

    CounterRng rng(7);
    std::vector<Complex> v(codec.block_dim);
    double norm = 0.0;
    for (Complex& z : v) {
        z = Complex(rng.next_double() - 0.5, rng.next_double() - 0.5);
        norm += std::norm(z);
    }
    norm = std::sqrt(norm);
    for (Complex& z : v) z /= norm;

    const EncodedBlock enc = encode(codec, v);
    const DecodedBlock dec = decode(codec, enc);
    c.expect(!dec.failed, "decode failed on random vector");

    Complex overlap(0.0, 0.0);
    for (std::size_t r = 0; r < v.size(); ++r) overlap += std::conj(v[r]) * dec.amplitudes[r];
    c.expect_near(std::norm(overlap), enc.in_subspace_mass, 1e-12,
                  "fidelity equals projection mass");

    const EncodedBlock again = encode(codec, dec.amplitudes);
    c.expect_near(again.in_subspace_mass, 1.0, 1e-12, "decoded vector lies in the subspace");
    return c.finish("codec-roundtrip", "projection mass identity and idempotence hold");
}

}  // namespace

std::vector<SelftestResult> run_selftests() {
    std::vector<SelftestResult> results;
    results.push_back(suite_binomial_window());
    results.push_back(suite_exhaustive_alpha());
    results.push_back(suite_word_enumeration());
    results.push_back(suite_communicating_classes());
    results.push_back(suite_jacobi_reconstruction());
    results.push_back(suite_codec_roundtrip());
    return results;
}

}  // namespace aeplab
