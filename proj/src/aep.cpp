#include "aeplab/aep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "aeplab/errors.hpp"

namespace aeplab {

namespace {

void check_epsilon(double epsilon) {
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw ParameterError("epsilon must lie in (0, 1), got " + std::to_string(epsilon));
}

void check_delta(double delta) {
    if (!(delta > 0.0))
        throw ParameterError("delta must be positive, got " + std::to_string(delta));
}

// Greedy prefix count: minimal k with probs[0] + ... + probs[k-1] >= 1 - eps.
// probs must be sorted descending.
std::size_t prefix_count(std::span<const double> probs, double epsilon) {
    const double target = 1.0 - epsilon;
    double acc = 0.0, comp = 0.0;
    for (std::size_t k = 0; k < probs.size(); ++k) {
        const double y = probs[k] - comp;
        const double t = acc + y;
        comp = (t - acc) - y;
        acc = t;
        if (acc >= target) return k + 1;
    }
    return probs.size();  // total mass is 1 within rounding; cover everything
}

}  // namespace

double EmpiricalDistribution::entropy() const { return shannon_entropy(probs); }

EmpiricalDistribution make_distribution(std::span<const double> weights) {
    std::vector<std::size_t> order(weights.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return weights[a] > weights[b]; });

    EmpiricalDistribution dist;
    double kept = 0.0, dropped = 0.0;
    for (std::size_t idx : order) {
        double w = weights[idx];
        if (w < 0.0) {
            if (w < -1e-10)
                throw ContractError("distribution: negative weight " + std::to_string(w));
            w = 0.0;
        }
        if (w < 1e-15) {
            dropped += w;
            continue;
        }
        dist.probs.push_back(w);
        dist.labels.push_back(idx);
        kept += w;
    }
    if (dropped > 1e-12)
        throw NumericalError("distribution: dropped mass " + std::to_string(dropped) +
                             " exceeds 1e-12");
    if (dist.probs.empty()) throw NumericalError("distribution: no atoms above 1e-15");
    for (double& p : dist.probs) p /= kept;
    return dist;
}

// ==== block spectra =========================================================

BlockSpectrum block_spectrum(const BlockState& block) {
    BlockSpectrum out;
    out.diagonal = block.diagonal;
    const std::size_t dim = block.density.dim();
    if (block.diagonal) {
        std::vector<double> diag(dim);
        for (std::size_t i = 0; i < dim; ++i) diag[i] = block.density.matrix()(i, i).real();
        std::vector<std::size_t> order(dim);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return diag[a] > diag[b]; });
        double sum = 0.0;
        for (std::size_t idx : order) {
            double v = diag[idx];
            if (v < -1e-10)
                throw ContractError("block spectrum: diagonal entry " + std::to_string(v));
            if (v < 0.0) v = 0.0;
            out.values.push_back(v);
            out.labels.push_back(idx);
            sum += v;
        }
        for (double& v : out.values) v /= sum;
    } else {
        EigenDecomposition eig = density_eig(block.density);
        out.values = std::move(eig.eigenvalues);
        out.vectors = std::move(eig.eigenvectors);
        out.labels.resize(dim);
        std::iota(out.labels.begin(), out.labels.end(), std::size_t{0});
    }
    return out;
}

double von_neumann_entropy(const DensityOperator& rho) {
    return shannon_entropy(density_eig(rho).eigenvalues);
}

EmpiricalDistribution spectrum_distribution(const BlockState& block) {
    const BlockSpectrum spec = block_spectrum(block);
    // Values are already sorted; make_distribution re-sorts harmlessly and
    // applies the support cut.  Map its labels back through the spectrum's.
    EmpiricalDistribution dist = make_distribution(spec.values);
    for (std::size_t& label : dist.labels) label = spec.labels[label];
    return dist;
}

// ==== beta / alpha ==========================================================

BetaResult beta(const BlockState& block, double epsilon) {
    check_epsilon(epsilon);
    const BlockSpectrum spec = block_spectrum(block);
    BetaResult r;
    r.n = block.shape.volume();
    r.epsilon = epsilon;
    r.count = prefix_count(spec.values, epsilon);
    r.beta = std::log(static_cast<double>(r.count));
    r.rate = r.beta / static_cast<double>(r.n);
    return r;
}

double alpha(const EmpiricalDistribution& dist, double epsilon) {
    check_epsilon(epsilon);
    return std::log(static_cast<double>(prefix_count(dist.probs, epsilon)));
}

// ==== level sets ============================================================

LevelMasses partition_levels(const EmpiricalDistribution& dist, std::size_t n, double h,
                             double delta) {
    check_delta(delta);
    if (n == 0) throw ParameterError("partition_levels: n must be >= 1");
    const double nd = static_cast<double>(n);
    const double hi = std::exp(-nd * (h - delta));  // upper cut
    const double lo = std::exp(-nd * (h + delta));  // lower cut
    std::vector<double> up, win, low;
    for (double p : dist.probs) {
        if (p > hi)
            up.push_back(p);
        else if (p < lo)
            low.push_back(p);
        else
            win.push_back(p);
    }
    return LevelMasses{kahan_sum(up), kahan_sum(win), kahan_sum(low)};
}

// ==== typical projector =====================================================

TypicalProjector typical_projector(const BlockState& block, double s, double delta,
                                   std::optional<double> delta_prime) {
    check_delta(delta);
    const double dp = delta_prime.value_or(delta / 2.0);
    if (!(dp > 0.0) || dp > delta)
        throw ParameterError("delta_prime must lie in (0, delta], got " + std::to_string(dp));

    TypicalProjector p;
    p.n = block.shape.volume();
    p.s = s;
    p.delta = delta;
    p.delta_prime = dp;

    const double nd = static_cast<double>(p.n);
    const double sel_hi = std::exp(-nd * (s - dp));
    const double sel_lo = std::exp(-nd * (s + dp));
    const double win_hi = std::exp(-nd * (s - delta));
    const double win_lo = std::exp(-nd * (s + delta));

    const BlockSpectrum spec = block_spectrum(block);
    std::vector<double> selected;
    bool inside = true;
    for (std::size_t k = 0; k < spec.values.size(); ++k) {
        const double lambda = spec.values[k];
        if (lambda >= sel_lo && lambda <= sel_hi) {
            p.selection.push_back(k);
            p.labels.push_back(spec.labels[k]);
            selected.push_back(lambda);
            inside = inside && lambda > win_lo && lambda < win_hi;
        }
    }
    p.mass = kahan_sum(selected);
    p.log_dim = p.selection.empty() ? -std::numeric_limits<double>::infinity()
                                    : std::log(static_cast<double>(p.selection.size()));
    p.mass_ok = p.mass > 1.0 - delta;
    p.window_ok = inside;  // vacuously true for an empty selection
    p.dim_ok = !p.selection.empty() && p.log_dim > nd * (s - delta) && p.log_dim < nd * (s + delta);
    return p;
}

// ==== convergence report ====================================================

AepReport aep_convergence_report(const SourceModel& model, std::size_t n_max,
                                 std::span<const double> epsilons, double delta,
                                 std::size_t max_dim) {
    if (n_max == 0) throw ParameterError("n_max must be >= 1");
    check_delta(delta);
    for (double eps : epsilons) check_epsilon(eps);

    AepReport report;
    report.model_hash = model_hash(model);
    report.s = mean_entropy(model);
    report.delta = delta;

    for (std::size_t n = 1; n <= n_max; ++n) {
        const BlockState block = block_density(model, n, max_dim);
        AepRow row;
        row.n = n;
        row.entropy = block_entropy(model, n, max_dim);
        row.entropy_rate = row.entropy / static_cast<double>(n);
        for (double eps : epsilons) row.betas[eps] = beta(block, eps);
        const TypicalProjector tp = typical_projector(block, report.s, delta);
        row.typical_mass = tp.mass;
        row.typical_log_dim = tp.log_dim;
        row.mass_ok = tp.mass_ok;
        row.window_ok = tp.window_ok;
        row.dim_ok = tp.dim_ok;
        report.rows.push_back(std::move(row));
    }

    // Endpoint comparison of |beta/n - s|: the sequence is not monotone step
    // by step at laboratory sizes, so the trend is judged first-vs-last, with
    // the first comparison point at n = 4 once the table reaches that far.
    const std::size_t n_first = std::min<std::size_t>(4, n_max);
    for (double eps : epsilons) {
        BetaTrend t;
        t.epsilon = eps;
        t.n_first = n_first;
        t.n_last = n_max;
        t.deviation_first = std::abs(report.rows[n_first - 1].betas.at(eps).rate - report.s);
        t.deviation_last = std::abs(report.rows[n_max - 1].betas.at(eps).rate - report.s);
        t.deviation_shrinks = t.deviation_last < t.deviation_first || n_first == n_max;
        report.trends.push_back(t);
    }
    return report;
}

}  // namespace aeplab
