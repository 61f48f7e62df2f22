#ifndef AEPLAB_AEP_HPP
#define AEPLAB_AEP_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "aeplab/linalg.hpp"
#include "aeplab/source_model.hpp"

namespace aeplab {

// Probability vector sorted descending, with the originating index of every
// atom retained (eigenvector column or computational-basis word).
struct EmpiricalDistribution {
    std::vector<double> probs;         // descending, renormalized to sum 1
    std::vector<std::size_t> labels;   // original index of each atom

    double entropy() const;  // Shannon, nats
};

// Sort descending (ties by ascending original index), drop atoms below 1e-15,
// renormalize.  Throws NumericalError if the dropped mass exceeds 1e-12.
EmpiricalDistribution make_distribution(std::span<const double> weights);

// Spectrum of a block together with its eigenbasis.  For diagonal blocks the
// basis is the computational one and no dense solver runs; labels are word
// indices either way (column indices for dense blocks).
struct BlockSpectrum {
    std::vector<double> values;        // descending, clipped + renormalized
    std::vector<std::size_t> labels;
    bool diagonal = false;
    ComplexMatrix vectors;             // dense path only: unit columns, sorted order
};

BlockSpectrum block_spectrum(const BlockState& block);

// S(rho) = -tr rho ln rho via the dense eigensolver.
double von_neumann_entropy(const DensityOperator& rho);

// Eigenvalue distribution of the block (the measure P^(n) on spectral atoms).
EmpiricalDistribution spectrum_distribution(const BlockState& block);

// log of the minimal dimension of a spectral projector capturing mass
// >= 1 - epsilon.  By the Ky Fan maximum principle this equals the general
// operator minimum alpha over all projectors of the same mass.
struct BetaResult {
    std::size_t n = 0;
    double epsilon = 0.0;
    std::size_t count = 0;   // minimal number of eigenvectors
    double beta = 0.0;       // ln(count)
    double rate = 0.0;       // beta / n
};

BetaResult beta(const BlockState& block, double epsilon);

// Classical analogue on an arbitrary distribution: ln of the minimal support
// size with mass >= 1 - epsilon.
double alpha(const EmpiricalDistribution& dist, double epsilon);

// Masses of the three eigenvalue level sets at rate h and width delta:
//   upper:  lambda  >  e^{-n(h-delta)}        (too large)
//   window: e^{-n(h+delta)} <= lambda <= e^{-n(h-delta)}
//   lower:  lambda  <  e^{-n(h+delta)}        (too small)
struct LevelMasses {
    double upper = 0.0;
    double window = 0.0;
    double lower = 0.0;
};

LevelMasses partition_levels(const EmpiricalDistribution& dist, std::size_t n, double h,
                             double delta);

// Spectral projector onto eigenvalues inside the delta_prime-window around
// e^{-n s}, with the three finite-n verdicts of the limit theorem:
//   mass_ok:    tr(rho p) > 1 - delta
//   window_ok:  every selected eigenvalue lies strictly inside the
//               delta-window (guaranteed when delta_prime < delta)
//   dim_ok:     e^{n(s-delta)} < dim < e^{n(s+delta)}
// delta_prime defaults to delta/2.
struct TypicalProjector {
    std::size_t n = 0;
    double s = 0.0;
    double delta = 0.0;
    double delta_prime = 0.0;
    std::vector<std::size_t> selection;  // positions into the sorted spectrum
    std::vector<std::size_t> labels;     // original indices of selected atoms
    double mass = 0.0;
    double log_dim = 0.0;                // ln(count); -inf when empty
    bool mass_ok = false;
    bool window_ok = false;
    bool dim_ok = false;
};

TypicalProjector typical_projector(const BlockState& block, double s, double delta,
                                   std::optional<double> delta_prime = std::nullopt);

// Convergence table over n = 1..n_max.
struct AepRow {
    std::size_t n = 0;
    double entropy = 0.0;        // S_n, nats
    double entropy_rate = 0.0;   // S_n / n
    std::map<double, BetaResult> betas;
    double typical_mass = 0.0;
    double typical_log_dim = 0.0;
    bool mass_ok = false;
    bool window_ok = false;
    bool dim_ok = false;
};

struct BetaTrend {
    double epsilon = 0.0;
    std::size_t n_first = 0;     // first row of the comparison (4 when available)
    std::size_t n_last = 0;
    double deviation_first = 0.0;  // |beta rate - s| at n_first
    double deviation_last = 0.0;
    bool deviation_shrinks = false;
};

struct AepReport {
    std::string model_hash;
    double s = 0.0;          // mean entropy, nats per site
    double delta = 0.0;
    std::vector<AepRow> rows;
    std::vector<BetaTrend> trends;
};

AepReport aep_convergence_report(const SourceModel& model, std::size_t n_max,
                                 std::span<const double> epsilons, double delta,
                                 std::size_t max_dim = kDefaultMaxDim);

}  // namespace aeplab

#endif
