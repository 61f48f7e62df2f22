#include "aeplab/codec.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "aeplab/errors.hpp"
#include "aeplab/rng.hpp"

namespace aeplab {

namespace {

bool ensemble_samplable(const SourceModel& model) {
    // Eigenvector sampling needs either basis vectors (diagonal blocks) or an
    // explicitly computed eigenbasis (dense product states).  Dressed chains
    // are excluded so that their analysis path never feeds back into the
    // sampler they would be checked against.
    return !std::holds_alternative<DressedMarkov>(model);
}

}  // namespace

CodecConfig build_codec(const SourceModel& model, std::size_t n, double delta,
                        std::optional<double> delta_prime, std::size_t max_dim) {
    const BlockState block = block_density(model, n, max_dim);
    CodecConfig codec;
    codec.source_hash = block.source_hash;
    codec.n = n;
    codec.s = mean_entropy(model);
    codec.block_dim = block.density.dim();
    codec.spectrum = block_spectrum(block);
    codec.projector = typical_projector(block, codec.s, delta, delta_prime);
    codec.delta = codec.projector.delta;
    codec.delta_prime = codec.projector.delta_prime;
    codec.samplable = ensemble_samplable(model);
    codec.code_dim = codec.projector.selection.size();
    codec.qubit_count = codec.code_dim <= 1
                            ? 0
                            : static_cast<std::size_t>(std::bit_width(codec.code_dim - 1));
    codec.qubit_rate = static_cast<double>(codec.qubit_count) / static_cast<double>(n);
    codec.typical_mass = codec.projector.mass;
    return codec;
}

EncodedBlock encode(const CodecConfig& codec, std::span<const Complex> vec) {
    if (vec.size() != codec.block_dim)
        throw StructuralError("encode: vector length " + std::to_string(vec.size()) +
                              " differs from block dimension " +
                              std::to_string(codec.block_dim));
    std::vector<double> norms;
    norms.reserve(vec.size());
    for (const Complex& v : vec) norms.push_back(std::norm(v));
    const double norm = std::sqrt(kahan_sum(norms));
    if (std::abs(norm - 1.0) > 1e-8)
        throw ContractError("encode: input norm " + std::to_string(norm) + " is not 1");

    EncodedBlock out;
    out.coords.reserve(codec.code_dim);
    std::vector<double> masses;
    masses.reserve(codec.code_dim);
    for (std::size_t pos : codec.projector.selection) {
        Complex c(0.0, 0.0);
        if (codec.spectrum.diagonal) {
            c = vec[codec.spectrum.labels[pos]];
        } else {
            for (std::size_t r = 0; r < codec.block_dim; ++r)
                c += std::conj(codec.spectrum.vectors(r, pos)) * vec[r];
        }
        out.coords.push_back(c);
        masses.push_back(std::norm(c));
    }
    out.in_subspace_mass = kahan_sum(masses);
    return out;
}

DecodedBlock decode(const CodecConfig& codec, const EncodedBlock& encoded) {
    if (encoded.coords.size() != codec.code_dim)
        throw StructuralError("decode: coordinate count " +
                              std::to_string(encoded.coords.size()) +
                              " differs from code dimension " + std::to_string(codec.code_dim));
    DecodedBlock out;
    out.amplitudes.assign(codec.block_dim, Complex(0.0, 0.0));
    std::vector<double> masses;
    masses.reserve(encoded.coords.size());
    for (const Complex& c : encoded.coords) masses.push_back(std::norm(c));
    const double mass = kahan_sum(masses);
    if (mass < 1e-300) {
        out.failed = true;
        return out;
    }
    const double scale = 1.0 / std::sqrt(mass);
    for (std::size_t i = 0; i < encoded.coords.size(); ++i) {
        const std::size_t pos = codec.projector.selection[i];
        const Complex c = encoded.coords[i] * scale;
        if (codec.spectrum.diagonal) {
            out.amplitudes[codec.spectrum.labels[pos]] += c;
        } else {
            for (std::size_t r = 0; r < codec.block_dim; ++r)
                out.amplitudes[r] += c * codec.spectrum.vectors(r, pos);
        }
    }
    return out;
}

FidelityReport ensemble_fidelity(const CodecConfig& codec, std::size_t trials,
                                 std::uint64_t seed) {
    if (!codec.samplable)
        throw UnsupportedError(
            "ensemble_fidelity: eigenvector sampling is not defined for this source variant");
    if (trials < 2) throw ParameterError("ensemble_fidelity: need at least 2 trials");

    CounterRng rng(seed);
    std::vector<Complex> sample(codec.block_dim);
    double sum = 0.0, sum_comp = 0.0;
    double sq = 0.0, sq_comp = 0.0;
    std::size_t failures = 0;

    for (std::size_t t = 0; t < trials; ++t) {
        // Draw a spectrum position by inverse CDF over the eigenvalues.
        const double u = rng.next_double();
        std::size_t pos = codec.spectrum.values.size() - 1;
        double acc = 0.0;
        for (std::size_t i = 0; i < codec.spectrum.values.size(); ++i) {
            acc += codec.spectrum.values[i];
            if (u < acc) {
                pos = i;
                break;
            }
        }

        std::fill(sample.begin(), sample.end(), Complex(0.0, 0.0));
        if (codec.spectrum.diagonal) {
            sample[codec.spectrum.labels[pos]] = 1.0;
        } else {
            for (std::size_t r = 0; r < codec.block_dim; ++r)
                sample[r] = codec.spectrum.vectors(r, pos);
        }

        const DecodedBlock back = decode(codec, encode(codec, sample));
        double fidelity = 0.0;
        if (back.failed) {
            ++failures;
        } else {
            Complex overlap(0.0, 0.0);
            for (std::size_t r = 0; r < codec.block_dim; ++r)
                overlap += std::conj(sample[r]) * back.amplitudes[r];
            fidelity = std::norm(overlap);
        }

        double y = fidelity - sum_comp;
        double s1 = sum + y;
        sum_comp = (s1 - sum) - y;
        sum = s1;
        y = fidelity * fidelity - sq_comp;
        double s2 = sq + y;
        sq_comp = (s2 - sq) - y;
        sq = s2;
    }

    FidelityReport report;
    report.trials = trials;
    report.seed = seed;
    report.typical_mass = codec.typical_mass;
    report.rate_qubits_per_site = codec.qubit_rate;
    report.zero_mass_events = failures;
    const double nd = static_cast<double>(trials);
    report.mean_fidelity = sum / nd;
    const double var = std::max(0.0, (sq - nd * report.mean_fidelity * report.mean_fidelity) /
                                         (nd - 1.0));
    report.stderr_fidelity = std::sqrt(var / nd);
    return report;
}

}  // namespace aeplab
