#include "aeplab/ergodic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "aeplab/errors.hpp"

namespace aeplab {

// ==== period ================================================================

std::size_t chain_period(const ClassicalMarkov& chain) {
    const std::size_t d = chain.alphabet_size();
    // BFS levels from state 0; the period is the gcd of level[a] + 1 - level[b]
    // over all edges a -> b.
    std::vector<long long> level(d, -1);
    std::vector<std::size_t> queue{0};
    level[0] = 0;
    std::size_t head = 0;
    long long g = 0;
    while (head < queue.size()) {
        const std::size_t a = queue[head++];
        for (std::size_t b = 0; b < d; ++b) {
            if (chain.prob(a, b) <= 0.0) continue;
            if (level[b] < 0) {
                level[b] = level[a] + 1;
                queue.push_back(b);
            } else {
                g = std::gcd(g, level[a] + 1 - level[b]);
            }
        }
    }
    if (g == 0)
        throw NumericalError("chain_period: no cycle found (chain not irreducible?)");
    return static_cast<std::size_t>(g < 0 ? -g : g);
}

// ==== decomposition =========================================================

namespace {

// Exact l-step reachability (boolean matrix power), immune to underflow.
std::vector<std::vector<bool>> step_reachability(const ClassicalMarkov& chain, std::size_t l) {
    const std::size_t d = chain.alphabet_size();
    std::vector<std::vector<bool>> adj(d, std::vector<bool>(d, false));
    for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = 0; b < d; ++b) adj[a][b] = chain.prob(a, b) > 0.0;
    std::vector<std::vector<bool>> pow = adj;
    for (std::size_t step = 1; step < l; ++step) {
        std::vector<std::vector<bool>> next(d, std::vector<bool>(d, false));
        for (std::size_t a = 0; a < d; ++a)
            for (std::size_t c = 0; c < d; ++c)
                if (pow[a][c])
                    for (std::size_t b = 0; b < d; ++b)
                        if (adj[c][b]) next[a][b] = true;
        pow.swap(next);
    }
    return pow;
}

std::vector<std::vector<bool>> transitive_closure(std::vector<std::vector<bool>> reach) {
    const std::size_t d = reach.size();
    for (std::size_t a = 0; a < d; ++a) reach[a][a] = true;
    for (std::size_t via = 0; via < d; ++via)
        for (std::size_t a = 0; a < d; ++a)
            if (reach[a][via])
                for (std::size_t b = 0; b < d; ++b)
                    if (reach[via][b]) reach[a][b] = true;
    return reach;
}

std::vector<double> push(const ClassicalMarkov& chain, const std::vector<double>& v) {
    const std::size_t d = chain.alphabet_size();
    std::vector<double> out(d, 0.0);
    for (std::size_t a = 0; a < d; ++a) {
        if (v[a] == 0.0) continue;
        for (std::size_t b = 0; b < d; ++b) out[b] += v[a] * chain.prob(a, b);
    }
    return out;
}

// H(a_0..a_{m-1}) for the chain started from `start`:
// H(start) + sum_{t=0}^{m-2} (start P^t) . row-entropies.
double chain_block_entropy(const ClassicalMarkov& chain, std::vector<double> start,
                           std::size_t m) {
    const std::size_t d = chain.alphabet_size();
    std::vector<double> row_entropy(d);
    for (std::size_t a = 0; a < d; ++a) {
        std::vector<double> row(d);
        for (std::size_t b = 0; b < d; ++b) row[b] = chain.prob(a, b);
        row_entropy[a] = shannon_entropy(row);
    }
    std::vector<double> terms{shannon_entropy(start)};
    for (std::size_t t = 0; t + 1 < m; ++t) {
        double h = 0.0;
        for (std::size_t a = 0; a < d; ++a) h += start[a] * row_entropy[a];
        terms.push_back(h);
        start = push(chain, start);
    }
    return kahan_sum(terms);
}

std::vector<double> start_word_distribution(const ClassicalMarkov& chain,
                                            const std::vector<double>& start, std::size_t m) {
    const std::size_t d = chain.alphabet_size();
    if (m == 0) return {1.0};
    std::vector<double> probs = start;
    for (std::size_t len = 2; len <= m; ++len) {
        std::vector<double> next(probs.size() * d, 0.0);
        for (std::size_t w = 0; w < probs.size(); ++w) {
            const double pw = probs[w];
            const std::size_t last = w % d;
            for (std::size_t b = 0; b < d; ++b) next[w * d + b] = pw * chain.prob(last, b);
        }
        probs.swap(next);
    }
    return probs;
}

// Largest word count the mixture self-check is allowed to enumerate.
constexpr std::size_t kWordBudget = 400000;

}  // namespace

Decomposition::Decomposition(ClassicalMarkov chain, std::size_t l)
    : chain_(std::move(chain)), l_(l) {
    if (l_ == 0) throw ParameterError("sublattice spacing l must be >= 1");
    if (l_ > kMaxSublatticeSpacing)
        throw ParameterError("sublattice spacing l = " + std::to_string(l_) +
                             " exceeds supported maximum " +
                             std::to_string(kMaxSublatticeSpacing));
    period_ = chain_period(chain_);
    const std::size_t d = chain_.alphabet_size();

    // Closed classes of the l-step chain = mutually reachable state sets.
    const auto reach = transitive_closure(step_reachability(chain_, l_));
    std::vector<long long> class_of(d, -1);
    std::vector<std::vector<std::size_t>> classes;
    for (std::size_t a = 0; a < d; ++a) {
        if (class_of[a] >= 0) continue;
        const std::size_t id = classes.size();
        classes.emplace_back();
        for (std::size_t b = 0; b < d; ++b)
            if (reach[a][b] && reach[b][a]) {
                if (class_of[b] >= 0)
                    throw NumericalError("ergodic decomposition: class overlap at state " +
                                         std::to_string(b));
                class_of[b] = static_cast<long long>(id);
                classes[id].push_back(b);
            }
    }

    const std::size_t k = classes.size();
    const std::size_t expected = std::gcd(l_, period_);
    if (k != expected)
        throw NumericalError("ergodic decomposition: found " + std::to_string(k) +
                             " closed classes, expected gcd(l, period) = " +
                             std::to_string(expected));

    // Cyclic order: start at the class of state 0 and follow single-step
    // transitions; every state of a class must step into the same next class.
    std::vector<std::size_t> order;
    std::vector<bool> seen(k, false);
    std::size_t current = static_cast<std::size_t>(class_of[0]);
    for (std::size_t x = 0; x < k; ++x) {
        if (seen[current])
            throw NumericalError("ergodic decomposition: class cycle shorter than k");
        order.push_back(current);
        seen[current] = true;
        long long next = -1;
        for (std::size_t a : classes[current])
            for (std::size_t b = 0; b < d; ++b) {
                if (chain_.prob(a, b) <= 0.0) continue;
                if (next < 0) next = class_of[b];
                if (class_of[b] != next)
                    throw NumericalError(
                        "ergodic decomposition: one-step image of a class is split");
            }
        current = static_cast<std::size_t>(next);
    }
    if (current != static_cast<std::size_t>(class_of[0]))
        throw NumericalError("ergodic decomposition: class cycle does not close");

    const std::vector<double>& pi = chain_.stationary();
    for (std::size_t x = 0; x < k; ++x) {
        ErgodicComponent comp;
        comp.index = x;
        comp.states = classes[order[x]];
        std::sort(comp.states.begin(), comp.states.end());
        double mass = 0.0;
        for (std::size_t a : comp.states) mass += pi[a];
        if (mass <= 0.0)
            throw NumericalError("ergodic decomposition: component with zero stationary mass");
        comp.start.assign(d, 0.0);
        for (std::size_t a : comp.states) comp.start[a] = pi[a] / mass;
        components_.push_back(std::move(comp));
    }

    // Self-checks: stationary mixture, translate identity, word mixture.
    for (std::size_t a = 0; a < d; ++a) {
        double mix = 0.0;
        for (const ErgodicComponent& comp : components_) mix += comp.start[a];
        mix /= static_cast<double>(k);
        diagnostics_.mixture_defect = std::max(diagnostics_.mixture_defect, std::abs(mix - pi[a]));
    }
    for (std::size_t x = 0; x < k; ++x) {
        const std::vector<double> pushed = push(chain_, components_[x].start);
        const std::vector<double>& next = components_[(x + 1) % k].start;
        for (std::size_t a = 0; a < d; ++a)
            diagnostics_.translate_defect =
                std::max(diagnostics_.translate_defect, std::abs(pushed[a] - next[a]));
    }
    std::size_t depth = 0, words = 1;
    while (depth < 3 * l_ && words <= kWordBudget / d) {
        words *= d;
        ++depth;
    }
    diagnostics_.word_depth = depth;
    if (depth > 0) {
        const std::vector<double> full = word_probabilities(chain_, depth);
        std::vector<double> mix(full.size(), 0.0);
        for (std::size_t x = 0; x < k; ++x) {
            const std::vector<double> part = component_word_distribution(x, depth);
            for (std::size_t w = 0; w < mix.size(); ++w)
                mix[w] += part[w] / static_cast<double>(k);
        }
        for (std::size_t w = 0; w < mix.size(); ++w)
            diagnostics_.word_defect = std::max(diagnostics_.word_defect,
                                                std::abs(mix[w] - full[w]));
    }
    if (diagnostics_.mixture_defect > 1e-12)
        throw NumericalError("ergodic decomposition: stationary mixture defect " +
                             std::to_string(diagnostics_.mixture_defect));
    if (diagnostics_.translate_defect > 1e-12)
        throw NumericalError("ergodic decomposition: translate identity defect " +
                             std::to_string(diagnostics_.translate_defect));
    if (diagnostics_.word_defect > 1e-10)
        throw NumericalError("ergodic decomposition: word mixture defect " +
                             std::to_string(diagnostics_.word_defect));
}

std::vector<double> Decomposition::component_word_distribution(std::size_t x,
                                                               std::size_t m) const {
    if (x >= k()) throw ParameterError("component index out of range");
    return start_word_distribution(chain_, components_[x].start, m);
}

double Decomposition::component_entropy_rate_Gl(std::size_t x) const {
    if (x >= k()) throw ParameterError("component index out of range");
    // Markov: the limit H(Lambda(ml))/m is attained by the conditional
    // entropy of one l-block given the previous one.
    return chain_block_entropy(chain_, components_[x].start, 2 * l_) -
           chain_block_entropy(chain_, components_[x].start, l_);
}

double Decomposition::component_finite_box_entropy(std::size_t x) const {
    if (x >= k()) throw ParameterError("component index out of range");
    return chain_block_entropy(chain_, components_[x].start, l_) / static_cast<double>(l_);
}

Decomposition ergodic_decompose(const ClassicalMarkov& chain, std::size_t l) {
    return Decomposition(chain, l);
}

// ==== component entropy equality ============================================

ComponentEntropyReport component_entropy_check(const ClassicalMarkov& chain, std::size_t l) {
    const Decomposition dec = ergodic_decompose(chain, l);
    ComponentEntropyReport report;
    report.l = l;
    report.k = dec.k();
    report.reference = static_cast<double>(l) * mean_entropy(SourceModel{chain});
    for (std::size_t x = 0; x < dec.k(); ++x)
        report.rates.push_back(dec.component_entropy_rate_Gl(x));
    for (double a : report.rates) {
        report.max_reference_diff =
            std::max(report.max_reference_diff, std::abs(a - report.reference));
        for (double b : report.rates)
            report.max_pairwise_diff = std::max(report.max_pairwise_diff, std::abs(a - b));
    }
    report.equal = report.max_pairwise_diff <= 1e-8 && report.max_reference_diff <= 1e-8;
    return report;
}

// ==== atypical density ======================================================

std::vector<AtypicalRow> atypical_density(const ClassicalMarkov& chain, std::size_t l_max,
                                          double eta) {
    if (l_max == 0) throw ParameterError("l_max must be >= 1");
    if (!(eta > 0.0)) throw ParameterError("eta must be positive, got " + std::to_string(eta));
    const double s = mean_entropy(SourceModel{chain});
    std::vector<AtypicalRow> rows;
    for (std::size_t l = 1; l <= l_max; ++l) {
        const Decomposition dec = ergodic_decompose(chain, l);
        AtypicalRow row;
        row.l = l;
        row.k = dec.k();
        for (std::size_t x = 0; x < dec.k(); ++x) {
            const double sx = dec.component_finite_box_entropy(x);
            row.finite_box_entropies.push_back(sx);
            if (sx - s >= eta) ++row.atypical_count;
        }
        row.fraction = static_cast<double>(row.atypical_count) / static_cast<double>(row.k);
        rows.push_back(std::move(row));
    }
    return rows;
}

// ==== classical view ========================================================

ClassicalMarkov as_classical(const SourceModel& model) {
    if (const auto* markov = std::get_if<ClassicalMarkov>(&model)) return *markov;
    if (const auto* dressed = std::get_if<DressedMarkov>(&model)) return dressed->base();
    const auto& iid = std::get<IIDProduct>(model);
    const std::size_t d = iid.site_density.dim();
    std::vector<double> probs(d);
    if (iid.site_density.matrix().is_diagonal()) {
        for (std::size_t i = 0; i < d; ++i) probs[i] = iid.site_density.matrix()(i, i).real();
    } else {
        probs = density_eig(iid.site_density).eigenvalues;
    }
    // A memoryless source is the chain whose rows all equal the site law.
    return ClassicalMarkov(std::vector<std::vector<double>>(d, probs));
}

const char* classical_basis(const SourceModel& model) {
    if (std::holds_alternative<ClassicalMarkov>(model)) return "computational";
    if (std::holds_alternative<DressedMarkov>(model)) return "base";
    return std::get<IIDProduct>(model).site_density.matrix().is_diagonal() ? "computational"
                                                                          : "eigenbasis";
}

// ==== maximal abelian restriction ===========================================

EmpiricalDistribution maximal_abelian_restriction(const DensityOperator& rho,
                                                  const ComplexMatrix& basis) {
    const std::size_t d = rho.dim();
    if (basis.rows() != d || basis.cols() != d)
        throw StructuralError("abelian restriction: basis shape " +
                              std::to_string(basis.rows()) + "x" + std::to_string(basis.cols()) +
                              " differs from state dim " + std::to_string(d));
    const double defect =
        (basis.adjoint() * basis).max_abs_diff(ComplexMatrix::identity(d));
    if (defect > 1e-10)
        throw ContractError("abelian restriction: basis orthonormality defect " +
                            std::to_string(defect));
    std::vector<double> diag(d);
    for (std::size_t i = 0; i < d; ++i) {
        Complex acc(0.0, 0.0);
        for (std::size_t r = 0; r < d; ++r)
            for (std::size_t c = 0; c < d; ++c)
                acc += std::conj(basis(r, i)) * rho.matrix()(r, c) * basis(c, i);
        diag[i] = acc.real();
    }
    return make_distribution(diag);
}

EmpiricalDistribution maximal_abelian_restriction_eigen(const DensityOperator& rho) {
    return maximal_abelian_restriction(rho, hermitian_eig(rho.matrix()).eigenvectors);
}

}  // namespace aeplab
