#ifndef AEPLAB_SOURCE_MODEL_HPP
#define AEPLAB_SOURCE_MODEL_HPP

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "aeplab/linalg.hpp"

namespace aeplab {

// Finite box on the lattice.  The one-dimensional chain is the nu = 1 case;
// interval(n) is the [0, n) box used throughout the analysis pipeline.
struct BoxShape {
    std::size_t nu = 1;
    std::vector<std::size_t> sides;

    static BoxShape interval(std::size_t n) { return BoxShape{1, {n}}; }
    std::size_t volume() const;
};

// Irreducible row-stochastic chain with its stationary law.  Construction
// validates stochasticity (rows sum to 1 within 1e-12, entries >= 0) and
// irreducibility, then solves pi P = pi by Cesaro-averaged power iteration,
// which converges for periodic chains as well.
class ClassicalMarkov {
public:
    explicit ClassicalMarkov(const std::vector<std::vector<double>>& transition);

    std::size_t alphabet_size() const { return n_; }
    double prob(std::size_t a, std::size_t b) const { return p_[a * n_ + b]; }
    const std::vector<double>& stationary() const { return pi_; }
    const std::vector<double>& flat_transition() const { return p_; }

private:
    std::size_t n_ = 0;
    std::vector<double> p_;   // row-major transition matrix
    std::vector<double> pi_;  // stationary distribution
};

// Product state rho^(x) n.
struct IIDProduct {
    DensityOperator site_density;
};

// Classical Markov chain conjugated sitewise by a unitary: blocks are
// U^(x)n D_n U^(x)n^dagger with D_n the diagonal word-probability matrix.
class DressedMarkov {
public:
    DressedMarkov(ClassicalMarkov base, ComplexMatrix site_unitary);

    const ClassicalMarkov& base() const { return base_; }
    const ComplexMatrix& site_unitary() const { return u_; }

private:
    ClassicalMarkov base_;
    ComplexMatrix u_;
};

using SourceModel = std::variant<IIDProduct, ClassicalMarkov, DressedMarkov>;

std::size_t site_dim(const SourceModel& model);

// True when block_density produces a matrix that is diagonal in the
// computational basis, so spectra can be read off without an eigensolver.
bool yields_diagonal_blocks(const SourceModel& model);

// n-block state of the chain together with the structure flags downstream
// passes rely on.
struct BlockState {
    BoxShape shape;
    DensityOperator density;
    std::size_t site_dim = 0;
    bool diagonal = false;      // density is diagonal in the computational basis
    std::string source_hash;    // model_hash of the generating source
};

// Stationary probabilities of all d^m words a_0...a_{m-1}, indexed with site 0
// as the most significant digit (matching kron order).  Works for classical
// and dressed models; m = 0 yields the single empty word.
std::vector<double> word_probabilities(const ClassicalMarkov& chain, std::size_t m);

// Restriction of the chain state to an n-site interval as a dense matrix.
// Throws CapacityError once d^n exceeds max_dim.
BlockState block_density(const SourceModel& model, std::size_t n,
                         std::size_t max_dim = kDefaultMaxDim);

// Von Neumann entropy of the n-block in nats.  Uses the model's analytic
// spectrum when one exists; capacity limits match block_density.
double block_entropy(const SourceModel& model, std::size_t n,
                     std::size_t max_dim = kDefaultMaxDim);

// Mean entropy s = lim S(n)/n in nats per site (closed form per variant).
double mean_entropy(const SourceModel& model);

// FNV-1a hash of a canonical serialization; equal models hash equally across
// runs and platforms.
std::string model_hash(const SourceModel& model);

// Parse a model definition from JSON text / file.  Errors mention the JSON
// path of the offending element (and line numbers for syntax errors).
SourceModel parse_model(const std::string& json_text);
SourceModel load_model(const std::string& path);

}  // namespace aeplab

#endif
