#include "aeplab/codec.hpp"

#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"

#include "aeplab/errors.hpp"
#include "aeplab/rng.hpp"

using namespace aeplab;

namespace {

constexpr double kIidEntropy = 0.3250829733914482;

SourceModel iid_09() {
    const double d[] = {0.9, 0.1};
    return IIDProduct{DensityOperator(ComplexMatrix::diagonal(d))};
}

SourceModel iid_mixed() {
    const double d[] = {0.5, 0.5};
    return IIDProduct{DensityOperator(ComplexMatrix::diagonal(d))};
}

SourceModel dressed_flip() {
    const double h = 1.0 / std::sqrt(2.0);
    return DressedMarkov(ClassicalMarkov({{0.8, 0.2}, {0.2, 0.8}}),
                         ComplexMatrix::from_rows({{Complex(h, 0), Complex(h, 0)},
                                                   {Complex(h, 0), Complex(-h, 0)}}));
}

std::vector<Complex> unit_basis_vector(std::size_t dim, std::size_t index) {
    std::vector<Complex> v(dim, Complex(0.0, 0.0));
    v[index] = Complex(1.0, 0.0);
    return v;
}

std::vector<Complex> random_unit_vector(std::size_t dim, std::uint64_t seed) {
    CounterRng rng(seed);
    std::vector<Complex> v(dim);
    double norm2 = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
        v[i] = Complex(2.0 * rng.next_double() - 1.0, 2.0 * rng.next_double() - 1.0);
        norm2 += std::norm(v[i]);
    }
    const double inv = 1.0 / std::sqrt(norm2);
    for (Complex& c : v) c *= inv;
    return v;
}

double overlap2(std::span<const Complex> a, std::span<const Complex> b) {
    Complex acc(0.0, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) acc += std::conj(a[i]) * b[i];
    return std::norm(acc);
}

}  // namespace

TEST_CASE("codec construction") {
    SUBCASE("iid(0.9, 0.1) at n = 12, delta = 0.1") {
        const CodecConfig codec = build_codec(iid_09(), 12, 0.1);
        CHECK(codec.n == 12);
        CHECK(codec.block_dim == 4096);
        CHECK(codec.code_dim == 12);
        CHECK(codec.qubit_count == 4);  // ceil(log2 12)
        CHECK(codec.qubit_rate == doctest::Approx(4.0 / 12.0).epsilon(1e-15));
        CHECK(codec.typical_mass == doctest::Approx(0.376572715308).epsilon(1e-11));
        CHECK(codec.samplable);
        CHECK(codec.delta_prime == doctest::Approx(0.05).epsilon(1e-15));
        CHECK(codec.source_hash.size() == 16);
    }
    SUBCASE("maximally mixed codes the whole block") {
        const CodecConfig codec = build_codec(iid_mixed(), 3, 0.1);
        CHECK(codec.code_dim == 8);
        CHECK(codec.qubit_count == 3);
        CHECK(codec.qubit_rate == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(codec.typical_mass == 1.0);
    }
    SUBCASE("an empty window yields a null code") {
        const CodecConfig codec = build_codec(iid_09(), 8, 0.05);
        CHECK(codec.code_dim == 0);
        CHECK(codec.qubit_count == 0);
        CHECK(codec.typical_mass == 0.0);
    }
    SUBCASE("dressed sources build but are not samplable") {
        const CodecConfig codec = build_codec(dressed_flip(), 2, 0.7, 0.7);
        CHECK_FALSE(codec.samplable);
        CHECK(codec.code_dim == 4);
    }
}

TEST_CASE("encode and decode") {
    const CodecConfig codec = build_codec(iid_09(), 12, 0.1);
    const std::size_t in_label = codec.projector.labels[0];
    SUBCASE("eigenvectors inside the window round-trip exactly") {
        const std::vector<Complex> v = unit_basis_vector(4096, in_label);
        const EncodedBlock enc = encode(codec, v);
        CHECK(enc.coords.size() == 12);
        CHECK(enc.in_subspace_mass == doctest::Approx(1.0).epsilon(1e-12));
        const DecodedBlock dec = decode(codec, enc);
        CHECK_FALSE(dec.failed);
        CHECK(overlap2(v, dec.amplitudes) == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("eigenvectors outside the window are lost") {
        // label 0 is the all-zeros word, p = 0.9^12, above the window
        const std::vector<Complex> v = unit_basis_vector(4096, 0);
        const EncodedBlock enc = encode(codec, v);
        CHECK(enc.in_subspace_mass == 0.0);
        CHECK(decode(codec, enc).failed);
    }
    SUBCASE("partial overlap projects onto the window component") {
        std::vector<Complex> v(4096, Complex(0.0, 0.0));
        v[in_label] = Complex(std::sqrt(0.6), 0.0);
        v[0] = Complex(0.0, std::sqrt(0.4));
        const EncodedBlock enc = encode(codec, v);
        CHECK(enc.in_subspace_mass == doctest::Approx(0.6).epsilon(1e-12));
        const DecodedBlock dec = decode(codec, enc);
        const std::vector<Complex> target = unit_basis_vector(4096, in_label);
        CHECK(overlap2(target, dec.amplitudes) == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("fidelity equals the in-subspace mass") {
        for (std::uint64_t seed = 1; seed <= 20; ++seed) {
            const std::vector<Complex> v = random_unit_vector(4096, seed);
            const EncodedBlock enc = encode(codec, v);
            const DecodedBlock dec = decode(codec, enc);
            CHECK(overlap2(v, dec.amplitudes) ==
                  doctest::Approx(enc.in_subspace_mass).epsilon(1e-10));
        }
    }
    SUBCASE("inputs are validated") {
        CHECK_THROWS_AS(encode(codec, std::vector<Complex>(7, Complex(0, 0))), StructuralError);
        std::vector<Complex> not_unit(4096, Complex(0.0, 0.0));
        not_unit[0] = Complex(0.5, 0.0);
        CHECK_THROWS_AS(encode(codec, not_unit), ContractError);
        EncodedBlock bad;
        bad.coords.assign(5, Complex(0.0, 0.0));
        CHECK_THROWS_AS(decode(codec, bad), StructuralError);
    }
    SUBCASE("dense-path codec round-trips too") {
        const CodecConfig dressed = build_codec(dressed_flip(), 2, 0.7, 0.7);
        const std::vector<Complex> v = random_unit_vector(4, 7);
        const EncodedBlock enc = encode(dressed, v);
        const DecodedBlock dec = decode(dressed, enc);
        CHECK(overlap2(v, dec.amplitudes) ==
              doctest::Approx(enc.in_subspace_mass).epsilon(1e-10));
    }
}

TEST_CASE("ensemble fidelity") {
    SUBCASE("estimates the typical mass within sampling error") {
        const CodecConfig codec = build_codec(iid_09(), 8, 0.25, 0.25);
        // [DERIVED] typical mass 0.81310473 at n = 8, delta' = 0.25
        CHECK(codec.typical_mass == doctest::Approx(0.8131047300000002).epsilon(1e-12));
        const FidelityReport rep = ensemble_fidelity(codec, 4000, 0);
        CHECK(rep.trials == 4000);
        CHECK(rep.seed == 0);
        CHECK(std::abs(rep.mean_fidelity - codec.typical_mass) <=
              3.0 * rep.stderr_fidelity + 1e-12);
        CHECK(rep.stderr_fidelity > 0.0);
        CHECK(rep.stderr_fidelity < 0.02);
        CHECK(rep.zero_mass_events > 0);
        CHECK(rep.zero_mass_events < 4000);
        CHECK(rep.rate_qubits_per_site == doctest::Approx(4.0 / 8.0).epsilon(1e-15));
    }
    SUBCASE("equal seeds reproduce bit for bit") {
        const CodecConfig codec = build_codec(iid_09(), 8, 0.25, 0.25);
        const FidelityReport a = ensemble_fidelity(codec, 500, 42);
        const FidelityReport b = ensemble_fidelity(codec, 500, 42);
        CHECK(a.mean_fidelity == b.mean_fidelity);
        CHECK(a.stderr_fidelity == b.stderr_fidelity);
        CHECK(a.zero_mass_events == b.zero_mass_events);
        const FidelityReport c = ensemble_fidelity(codec, 500, 43);
        CHECK(a.mean_fidelity != c.mean_fidelity);
    }
    SUBCASE("perfect code has zero spread") {
        const CodecConfig codec = build_codec(iid_mixed(), 3, 0.1);
        const FidelityReport rep = ensemble_fidelity(codec, 100, 0);
        CHECK(rep.mean_fidelity == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(rep.stderr_fidelity <= 1e-12);
        CHECK(rep.zero_mass_events == 0);
    }
    SUBCASE("dressed sources are refused") {
        const CodecConfig codec = build_codec(dressed_flip(), 2, 0.7, 0.7);
        CHECK_THROWS_AS(ensemble_fidelity(codec, 10, 0), UnsupportedError);
    }
    SUBCASE("trial counts are validated") {
        const CodecConfig codec = build_codec(iid_09(), 4, 0.25, 0.25);
        CHECK_THROWS_AS(ensemble_fidelity(codec, 1, 0), ParameterError);
    }
}
