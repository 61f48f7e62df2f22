#include "aeplab/source_model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "json.hpp"

#include "aeplab/errors.hpp"

namespace aeplab {

using nlohmann::json;

// ==== BoxShape ==============================================================

std::size_t BoxShape::volume() const {
    if (nu != sides.size())
        throw StructuralError("box shape: nu = " + std::to_string(nu) + " but " +
                              std::to_string(sides.size()) + " side lengths");
    std::size_t v = 1;
    for (std::size_t s : sides) {
        if (s == 0) throw StructuralError("box shape: zero side length");
        v *= s;
    }
    return v;
}

// ==== ClassicalMarkov =======================================================

namespace {

// Reachability over the directed graph with an edge a -> b iff p[a*n+b] > 0.
std::vector<bool> reachable_from(const std::vector<double>& p, std::size_t n,
                                 std::size_t start, bool transpose) {
    std::vector<bool> seen(n, false);
    std::vector<std::size_t> stack{start};
    seen[start] = true;
    while (!stack.empty()) {
        const std::size_t a = stack.back();
        stack.pop_back();
        for (std::size_t b = 0; b < n; ++b) {
            const double w = transpose ? p[b * n + a] : p[a * n + b];
            if (w > 0.0 && !seen[b]) {
                seen[b] = true;
                stack.push_back(b);
            }
        }
    }
    return seen;
}

std::vector<double> stationary_distribution(const std::vector<double>& p, std::size_t n) {
    std::vector<double> v(n, 1.0 / static_cast<double>(n));
    std::vector<double> w(n), avg(n), check(n);
    const std::size_t window = std::max<std::size_t>(64, 4 * n);
    constexpr double kTol = 1e-12;
    constexpr std::size_t kMaxSteps = 100000;

    auto apply = [&](const std::vector<double>& x, std::vector<double>& out) {
        std::fill(out.begin(), out.end(), 0.0);
        for (std::size_t a = 0; a < n; ++a) {
            const double xa = x[a];
            if (xa == 0.0) continue;
            for (std::size_t b = 0; b < n; ++b) out[b] += xa * p[a * n + b];
        }
    };

    // Cesaro-averaged power iteration, restarted from the running average.
    // Averaging over a window kills the unit-modulus rotating components of a
    // periodic chain by a factor ~period/window per restart, so the overall
    // convergence is geometric even when plain power iteration would cycle.
    for (std::size_t steps = 0; steps < kMaxSteps; steps += window) {
        std::fill(avg.begin(), avg.end(), 0.0);
        w = v;
        for (std::size_t i = 0; i < window; ++i) {
            apply(w, check);
            w.swap(check);
            for (std::size_t b = 0; b < n; ++b) avg[b] += w[b];
        }
        double norm = 0.0;
        for (double& x : avg) norm += x;
        for (double& x : avg) x /= norm;
        v = avg;
        apply(v, check);
        double residual = 0.0;
        for (std::size_t b = 0; b < n; ++b) residual = std::max(residual, std::abs(check[b] - v[b]));
        if (residual <= kTol) return v;
    }
    throw NumericalError("stationary distribution: no convergence to 1e-12 within 100000 steps");
}

}  // namespace

ClassicalMarkov::ClassicalMarkov(const std::vector<std::vector<double>>& transition) {
    n_ = transition.size();
    if (n_ == 0) throw StructuralError("markov chain: empty transition matrix");
    p_.assign(n_ * n_, 0.0);
    for (std::size_t a = 0; a < n_; ++a) {
        if (transition[a].size() != n_)
            throw StructuralError("markov chain: row " + std::to_string(a) + " has " +
                                  std::to_string(transition[a].size()) + " entries, expected " +
                                  std::to_string(n_));
        double row_sum = 0.0;
        for (std::size_t b = 0; b < n_; ++b) {
            const double w = transition[a][b];
            if (!std::isfinite(w) || w < 0.0)
                throw ContractError("markov chain: entry (" + std::to_string(a) + "," +
                                    std::to_string(b) + ") = " + std::to_string(w) +
                                    " is not a probability");
            p_[a * n_ + b] = w;
            row_sum += w;
        }
        if (std::abs(row_sum - 1.0) > 1e-12)
            throw ContractError("markov chain: row " + std::to_string(a) + " sums to " +
                                std::to_string(row_sum));
    }

    const std::vector<bool> fwd = reachable_from(p_, n_, 0, false);
    const std::vector<bool> bwd = reachable_from(p_, n_, 0, true);
    for (std::size_t a = 0; a < n_; ++a)
        if (!fwd[a] || !bwd[a])
            throw ContractError("markov chain: not irreducible (state " + std::to_string(a) +
                                " does not communicate with state 0)");

    pi_ = stationary_distribution(p_, n_);
}

// ==== DressedMarkov =========================================================

DressedMarkov::DressedMarkov(ClassicalMarkov base, ComplexMatrix site_unitary)
    : base_(std::move(base)), u_(std::move(site_unitary)) {
    if (u_.rows() != u_.cols())
        throw StructuralError("dressed model: unitary not square");
    if (u_.rows() != base_.alphabet_size())
        throw StructuralError("dressed model: unitary dim " + std::to_string(u_.rows()) +
                              " differs from alphabet size " +
                              std::to_string(base_.alphabet_size()));
    const double defect = (u_.adjoint() * u_).max_abs_diff(ComplexMatrix::identity(u_.rows()));
    if (defect > 1e-10)
        throw ContractError("dressed model: unitarity defect " + std::to_string(defect));
}

// ==== model-level queries ===================================================

std::size_t site_dim(const SourceModel& model) {
    return std::visit(
        [](const auto& m) -> std::size_t {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, IIDProduct>)
                return m.site_density.dim();
            else if constexpr (std::is_same_v<T, ClassicalMarkov>)
                return m.alphabet_size();
            else
                return m.base().alphabet_size();
        },
        model);
}

bool yields_diagonal_blocks(const SourceModel& model) {
    return std::visit(
        [](const auto& m) -> bool {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, IIDProduct>)
                return m.site_density.matrix().is_diagonal();
            else if constexpr (std::is_same_v<T, ClassicalMarkov>)
                return true;
            else
                return false;
        },
        model);
}

// ==== word probabilities ====================================================

std::vector<double> word_probabilities(const ClassicalMarkov& chain, std::size_t m) {
    const std::size_t d = chain.alphabet_size();
    if (m == 0) return {1.0};
    std::vector<double> probs = chain.stationary();
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

// ==== block construction ====================================================

namespace {

std::size_t checked_block_dim(std::size_t d, std::size_t n, std::size_t max_dim) {
    if (n == 0) throw ParameterError("block size n must be >= 1");
    std::size_t dim = 1;
    for (std::size_t i = 0; i < n; ++i) {
        if (dim > max_dim / d)
            throw CapacityError("block dimension " + std::to_string(d) + "^" +
                                std::to_string(n) + " exceeds capacity " +
                                std::to_string(max_dim));
        dim *= d;
    }
    return dim;
}

}  // namespace

BlockState block_density(const SourceModel& model, std::size_t n, std::size_t max_dim) {
    const std::size_t d = site_dim(model);
    const std::size_t dim = checked_block_dim(d, n, max_dim);

    ComplexMatrix block;
    if (const auto* iid = std::get_if<IIDProduct>(&model)) {
        block = ComplexMatrix::identity(1);
        for (std::size_t i = 0; i < n; ++i) block = kron(block, iid->site_density.matrix(), max_dim);
    } else if (const auto* markov = std::get_if<ClassicalMarkov>(&model)) {
        const std::vector<double> probs = word_probabilities(*markov, n);
        block = ComplexMatrix::diagonal(probs);
    } else {
        const auto& dressed = std::get<DressedMarkov>(model);
        const std::vector<double> probs = word_probabilities(dressed.base(), n);
        ComplexMatrix un = ComplexMatrix::identity(1);
        for (std::size_t i = 0; i < n; ++i) un = kron(un, dressed.site_unitary(), max_dim);
        // U_n diag(probs) U_n^dagger, filled Hermitian-symmetrically.
        block = ComplexMatrix(dim, dim);
        for (std::size_t i = 0; i < dim; ++i)
            for (std::size_t j = i; j < dim; ++j) {
                Complex acc(0.0, 0.0);
                for (std::size_t k = 0; k < dim; ++k)
                    acc += un(i, k) * probs[k] * std::conj(un(j, k));
                block(i, j) = acc;
                if (j != i) block(j, i) = std::conj(acc);
            }
    }

    BlockState state{BoxShape::interval(n), DensityOperator(std::move(block)), d,
                     yields_diagonal_blocks(model), model_hash(model)};
    return state;
}

// ==== entropies =============================================================

namespace {

double site_entropy(const DensityOperator& rho) {
    if (rho.matrix().is_diagonal()) {
        std::vector<double> diag(rho.dim());
        for (std::size_t i = 0; i < rho.dim(); ++i) diag[i] = rho.matrix()(i, i).real();
        return shannon_entropy(diag);
    }
    return shannon_entropy(density_eig(rho).eigenvalues);
}

double markov_entropy_rate(const ClassicalMarkov& chain) {
    const std::size_t d = chain.alphabet_size();
    std::vector<double> terms;
    terms.reserve(d * d);
    for (std::size_t a = 0; a < d; ++a) {
        const double pa = chain.stationary()[a];
        for (std::size_t b = 0; b < d; ++b) {
            const double w = chain.prob(a, b);
            terms.push_back(w < 1e-300 ? 0.0 : -pa * w * std::log(w));
        }
    }
    return kahan_sum(terms);
}

}  // namespace

double block_entropy(const SourceModel& model, std::size_t n, std::size_t max_dim) {
    checked_block_dim(site_dim(model), n, max_dim);
    // Each variant has an exact spectral shortcut: product states scale the
    // site entropy, and sitewise unitaries do not move the spectrum.  The
    // dense eigensolver path (von_neumann_entropy of the built block) is
    // checked against these in the tests.
    return std::visit(
        [n](const auto& m) -> double {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, IIDProduct>)
                return static_cast<double>(n) * site_entropy(m.site_density);
            else if constexpr (std::is_same_v<T, ClassicalMarkov>)
                return shannon_entropy(word_probabilities(m, n));
            else
                return shannon_entropy(word_probabilities(m.base(), n));
        },
        model);
}

double mean_entropy(const SourceModel& model) {
    return std::visit(
        [](const auto& m) -> double {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, IIDProduct>)
                return site_entropy(m.site_density);
            else if constexpr (std::is_same_v<T, ClassicalMarkov>)
                return markov_entropy_rate(m);
            else
                return markov_entropy_rate(m.base());
        },
        model);
}

// ==== hashing ===============================================================

namespace {

void hash_bytes(std::uint64_t& h, const void* data, std::size_t len) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= bytes[i];
        h *= 1099511628211ull;  // FNV-1a prime
    }
}

void hash_double(std::uint64_t& h, double x) {
    if (x == 0.0) x = 0.0;  // collapse -0.0
    const std::uint64_t bits = std::bit_cast<std::uint64_t>(x);
    hash_bytes(h, &bits, sizeof bits);
}

void hash_matrix(std::uint64_t& h, const ComplexMatrix& m) {
    const std::uint64_t r = m.rows(), c = m.cols();
    hash_bytes(h, &r, sizeof r);
    hash_bytes(h, &c, sizeof c);
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) {
            hash_double(h, m(i, j).real());
            hash_double(h, m(i, j).imag());
        }
}

void hash_chain(std::uint64_t& h, const ClassicalMarkov& chain) {
    const std::uint64_t d = chain.alphabet_size();
    hash_bytes(h, &d, sizeof d);
    for (double w : chain.flat_transition()) hash_double(h, w);
}

}  // namespace

std::string model_hash(const SourceModel& model) {
    std::uint64_t h = 14695981039346656037ull;  // FNV-1a offset basis
    std::visit(
        [&h](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, IIDProduct>) {
                hash_bytes(h, "iid", 3);
                hash_matrix(h, m.site_density.matrix());
            } else if constexpr (std::is_same_v<T, ClassicalMarkov>) {
                hash_bytes(h, "markov", 6);
                hash_chain(h, m);
            } else {
                hash_bytes(h, "dressed", 7);
                hash_chain(h, m.base());
                hash_matrix(h, m.site_unitary());
            }
        },
        model);
    std::ostringstream out;
    out << std::hex << std::setw(16) << std::setfill('0') << h;
    return out.str();
}

// ==== JSON loading ==========================================================

namespace {

[[noreturn]] void model_error(const std::string& path, const std::string& what) {
    throw ContractError("model file: " + path + ": " + what);
}

double read_number(const json& j, const std::string& path) {
    if (!j.is_number()) model_error(path, "expected a number");
    return j.get<double>();
}

Complex read_complex(const json& j, const std::string& path) {
    if (j.is_number()) return Complex(j.get<double>(), 0.0);
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return Complex(j[0].get<double>(), j[1].get<double>());
    model_error(path, "expected a number or an [re, im] pair");
}

ComplexMatrix read_complex_matrix(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) model_error(path, "expected a non-empty array of rows");
    const std::size_t n = j.size();
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        const json& row = j[i];
        const std::string row_path = path + "/" + std::to_string(i);
        if (!row.is_array()) model_error(row_path, "expected an array");
        if (row.size() != n)
            model_error(row_path, "expected " + std::to_string(n) + " entries, got " +
                                      std::to_string(row.size()));
        for (std::size_t k = 0; k < n; ++k)
            m(i, k) = read_complex(row[k], row_path + "/" + std::to_string(k));
    }
    return m;
}

std::vector<std::vector<double>> read_real_matrix(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) model_error(path, "expected a non-empty array of rows");
    const std::size_t n = j.size();
    std::vector<std::vector<double>> m(n);
    for (std::size_t i = 0; i < n; ++i) {
        const json& row = j[i];
        const std::string row_path = path + "/" + std::to_string(i);
        if (!row.is_array()) model_error(row_path, "expected an array");
        if (row.size() != n)
            model_error(row_path, "expected " + std::to_string(n) + " entries, got " +
                                      std::to_string(row.size()));
        m[i].reserve(n);
        for (std::size_t k = 0; k < n; ++k)
            m[i].push_back(read_number(row[k], row_path + "/" + std::to_string(k)));
    }
    return m;
}

void check_keys(const json& j, std::initializer_list<const char*> allowed) {
    for (const auto& item : j.items()) {
        bool ok = false;
        for (const char* key : allowed) ok = ok || item.key() == key;
        if (!ok) {
            std::string keys;
            for (const char* key : allowed) keys += std::string(keys.empty() ? "" : ", ") + key;
            model_error("/" + item.key(), "unknown key (allowed: " + keys + ")");
        }
    }
}

std::pair<std::size_t, std::size_t> line_of_byte(const std::string& text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

}  // namespace

SourceModel parse_model(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        const auto [line, col] = line_of_byte(json_text, e.byte);
        throw ContractError("model file: syntax error at line " + std::to_string(line) +
                            ", column " + std::to_string(col) + ": " + e.what());
    }
    if (!j.is_object()) model_error("/", "expected a JSON object");
    if (!j.contains("type") || !j["type"].is_string())
        model_error("/type", "expected a string (\"iid\", \"markov\" or \"dressed\")");
    const std::string type = j["type"].get<std::string>();

    if (type == "iid") {
        check_keys(j, {"type", "site_density"});
        if (!j.contains("site_density")) model_error("/site_density", "missing");
        ComplexMatrix m = read_complex_matrix(j["site_density"], "/site_density");
        return IIDProduct{DensityOperator(std::move(m))};
    }
    if (type == "markov") {
        check_keys(j, {"type", "transition"});
        if (!j.contains("transition")) model_error("/transition", "missing");
        return ClassicalMarkov(read_real_matrix(j["transition"], "/transition"));
    }
    if (type == "dressed") {
        check_keys(j, {"type", "transition", "unitary"});
        if (!j.contains("transition")) model_error("/transition", "missing");
        if (!j.contains("unitary")) model_error("/unitary", "missing");
        ClassicalMarkov base(read_real_matrix(j["transition"], "/transition"));
        ComplexMatrix u = read_complex_matrix(j["unitary"], "/unitary");
        return DressedMarkov(std::move(base), std::move(u));
    }
    model_error("/type", "unknown model type \"" + type + "\"");
}

SourceModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParameterError("cannot open model file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_model(buf.str());
}

}  // namespace aeplab
