#ifndef AEPLAB_CODEC_HPP
#define AEPLAB_CODEC_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "aeplab/aep.hpp"
#include "aeplab/linalg.hpp"
#include "aeplab/source_model.hpp"

namespace aeplab {

// Fixed-length typical-subspace code for n-blocks of a source.  The code
// space is spanned by the block eigenvectors selected by typical_projector;
// ceil(log2 dim) qubits address it.
struct CodecConfig {
    std::string source_hash;
    std::size_t n = 0;
    double delta = 0.0;
    double delta_prime = 0.0;
    double s = 0.0;              // mean entropy used for the window
    std::size_t block_dim = 0;   // d^n
    BlockSpectrum spectrum;      // full block eigensystem (sampling + encoding)
    TypicalProjector projector;  // selected eigenvalue window
    bool samplable = false;      // ensemble_fidelity supports this source
    std::size_t code_dim = 0;    // projector dimension; may be 0 at small n
    std::size_t qubit_count = 0; // ceil(log2 code_dim), 0 when code_dim <= 1
    double qubit_rate = 0.0;     // qubits per site
    double typical_mass = 0.0;
};

CodecConfig build_codec(const SourceModel& model, std::size_t n, double delta,
                        std::optional<double> delta_prime = std::nullopt,
                        std::size_t max_dim = kDefaultMaxDim);

// Coordinates of a block vector in the code basis.
struct EncodedBlock {
    std::vector<Complex> coords;
    double in_subspace_mass = 0.0;  // squared norm of the projection
};

// `vec` must be a unit vector of the block dimension (within 1e-8).
EncodedBlock encode(const CodecConfig& codec, std::span<const Complex> vec);

struct DecodedBlock {
    std::vector<Complex> amplitudes;  // unit block vector, or zeros on failure
    bool failed = false;              // projection had (near-)zero mass
};

DecodedBlock decode(const CodecConfig& codec, const EncodedBlock& encoded);

// Monte-Carlo fidelity of the codec over the eigenvector ensemble of the
// block state (eigenvectors drawn with their eigenvalue weights).  The mean
// estimates the typical mass; the deterministic counter RNG makes runs with
// equal seeds byte-identical.
struct FidelityReport {
    std::size_t trials = 0;
    std::uint64_t seed = 0;
    double mean_fidelity = 0.0;
    double stderr_fidelity = 0.0;
    double typical_mass = 0.0;
    double rate_qubits_per_site = 0.0;
    std::size_t zero_mass_events = 0;
};

FidelityReport ensemble_fidelity(const CodecConfig& codec, std::size_t trials,
                                 std::uint64_t seed);

}  // namespace aeplab

#endif
