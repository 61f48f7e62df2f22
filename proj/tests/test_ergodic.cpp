#include "aeplab/ergodic.hpp"

#include <cmath>
#include <vector>

#include "doctest.h"

#include "aeplab/errors.hpp"

using namespace aeplab;

namespace {

// [DERIVED] closed forms for the two laboratory chains:
//   flip(0.2):    s = H(0.2)
//   period-2:     s = H(0.3); every G_2 component rate = 2s;
//                 s_x^(2) = (ln 2 + H(0.3)) / 2
constexpr double kFlipRate = 0.5004024235381879;
constexpr double kPeriod2Rate = 0.6108643020548935;
constexpr double kPeriod2RateG2 = 1.221728604109787;
constexpr double kPeriod2FiniteBox2 = 0.6520057413074194;

ClassicalMarkov flip_chain() { return ClassicalMarkov({{0.8, 0.2}, {0.2, 0.8}}); }

ClassicalMarkov period2_chain() {
    return ClassicalMarkov({{0.0, 0.0, 0.7, 0.3},
                            {0.0, 0.0, 0.3, 0.7},
                            {0.7, 0.3, 0.0, 0.0},
                            {0.3, 0.7, 0.0, 0.0}});
}

}  // namespace

TEST_CASE("chain periods") {
    CHECK(chain_period(flip_chain()) == 1);
    CHECK(chain_period(period2_chain()) == 2);
    CHECK(chain_period(ClassicalMarkov({{0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}, {1.0, 0.0, 0.0}})) == 3);
}

TEST_CASE("decomposition of the period-2 chain at l = 2") {
    const Decomposition dec = ergodic_decompose(period2_chain(), 2);
    CHECK(dec.l() == 2);
    CHECK(dec.k() == 2);
    CHECK(dec.period() == 2);
    CHECK(dec.k_divides_l());

    SUBCASE("components split the state space along the bipartition") {
        REQUIRE(dec.components().size() == 2);
        CHECK(dec.components()[0].states == std::vector<std::size_t>{0, 1});
        CHECK(dec.components()[1].states == std::vector<std::size_t>{2, 3});
        const std::vector<double> want0 = {0.5, 0.5, 0.0, 0.0};
        const std::vector<double> want1 = {0.0, 0.0, 0.5, 0.5};
        for (std::size_t i = 0; i < 4; ++i) {
            CHECK(dec.components()[0].start[i] == doctest::Approx(want0[i]).epsilon(1e-10));
            CHECK(dec.components()[1].start[i] == doctest::Approx(want1[i]).epsilon(1e-10));
        }
    }
    SUBCASE("construction diagnostics hold") {
        CHECK(dec.diagnostics().mixture_defect <= 1e-12);
        CHECK(dec.diagnostics().translate_defect <= 1e-12);
        CHECK(dec.diagnostics().word_defect <= 1e-10);
        CHECK(dec.diagnostics().word_depth == 6);
    }
    SUBCASE("component word distributions by hand") {
        const std::vector<double> w1 = dec.component_word_distribution(0, 1);
        CHECK(w1[0] == doctest::Approx(0.5).epsilon(1e-10));
        CHECK(w1[1] == doctest::Approx(0.5).epsilon(1e-10));
        CHECK(w1[2] == 0.0);
        CHECK(w1[3] == 0.0);
        const std::vector<double> w2 = dec.component_word_distribution(0, 2);
        CHECK(w2[2] == doctest::Approx(0.35).epsilon(1e-14));   // word 02
        CHECK(w2[3] == doctest::Approx(0.15).epsilon(1e-14));   // word 03
        CHECK(w2[6] == doctest::Approx(0.15).epsilon(1e-14));   // word 12
        CHECK(w2[7] == doctest::Approx(0.35).epsilon(1e-14));   // word 13
        CHECK(w2[0] == 0.0);
        CHECK(kahan_sum(w2) == doctest::Approx(1.0).epsilon(1e-14));
    }
    SUBCASE("entropy rates match 2s and the finite box density") {
        CHECK(dec.component_entropy_rate_Gl(0) ==
              doctest::Approx(kPeriod2RateG2).epsilon(1e-12));
        CHECK(dec.component_entropy_rate_Gl(1) ==
              doctest::Approx(kPeriod2RateG2).epsilon(1e-12));
        CHECK(dec.component_finite_box_entropy(0) ==
              doctest::Approx(kPeriod2FiniteBox2).epsilon(1e-13));
        CHECK(dec.component_finite_box_entropy(1) ==
              doctest::Approx(kPeriod2FiniteBox2).epsilon(1e-13));
    }
}

TEST_CASE("decomposition across spacings") {
    SUBCASE("odd spacing merges the components") {
        const Decomposition dec = ergodic_decompose(period2_chain(), 3);
        CHECK(dec.k() == 1);
        CHECK(dec.k_divides_l());
        CHECK(dec.components()[0].states == std::vector<std::size_t>{0, 1, 2, 3});
        CHECK(dec.component_entropy_rate_Gl(0) ==
              doctest::Approx(3.0 * kPeriod2Rate).epsilon(1e-12));
    }
    SUBCASE("l = 4 keeps two components at rate 4s") {
        const Decomposition dec = ergodic_decompose(period2_chain(), 4);
        CHECK(dec.k() == 2);
        CHECK(dec.component_entropy_rate_Gl(0) ==
              doctest::Approx(4.0 * kPeriod2Rate).epsilon(1e-12));
    }
    SUBCASE("aperiodic chains never split") {
        const Decomposition dec = ergodic_decompose(flip_chain(), 1);
        CHECK(dec.k() == 1);
        CHECK(dec.period() == 1);
        CHECK(dec.component_entropy_rate_Gl(0) == doctest::Approx(kFlipRate).epsilon(1e-12));
        CHECK(ergodic_decompose(flip_chain(), 5).k() == 1);
    }
    SUBCASE("spacing is validated") {
        CHECK_THROWS_AS(ergodic_decompose(flip_chain(), 0), ParameterError);
        CHECK_THROWS_AS(ergodic_decompose(flip_chain(), kMaxSublatticeSpacing + 1),
                        ParameterError);
    }
}

TEST_CASE("component entropy check") {
    const ComponentEntropyReport rep = component_entropy_check(period2_chain(), 2);
    CHECK(rep.l == 2);
    CHECK(rep.k == 2);
    REQUIRE(rep.rates.size() == 2);
    CHECK(rep.reference == doctest::Approx(kPeriod2RateG2).epsilon(1e-13));
    CHECK(rep.max_pairwise_diff <= 1e-8);
    CHECK(rep.max_reference_diff <= 1e-8);
    CHECK(rep.equal);
}

TEST_CASE("atypical component density") {
    const ClassicalMarkov chain = period2_chain();
    const std::vector<AtypicalRow> rows = atypical_density(chain, 17, 0.05);
    REQUIRE(rows.size() == 17);
    SUBCASE("odd spacings below L are atypical, everything at or above L is not") {
        // [DERIVED] deviation = |ln 4 - H(0.3)| / l for odd l, |ln 2 - H(0.3)| / l
        // for even l; the former crosses eta = 0.05 between l = 15 and l = 17.
        CHECK(rows[0].fraction == 1.0);    // l = 1
        CHECK(rows[1].fraction == 0.0);    // l = 2
        CHECK(rows[14].fraction == 1.0);   // l = 15
        CHECK(rows[15].fraction == 0.0);   // l = 16
        CHECK(rows[16].fraction == 0.0);   // l = 17
        std::size_t L = 1;
        for (std::size_t l = 1; l <= 17; ++l)
            if (rows[l - 1].fraction > 0.0) L = l + 1;
        CHECK(L == 16);
    }
    SUBCASE("per-row bookkeeping") {
        CHECK(rows[1].l == 2);
        CHECK(rows[1].k == 2);
        CHECK(rows[1].atypical_count == 0);
        CHECK(rows[1].finite_box_entropies[0] ==
              doctest::Approx(kPeriod2FiniteBox2).epsilon(1e-13));
        CHECK(rows[14].k == 1);
        CHECK(rows[14].atypical_count == 1);
    }
    SUBCASE("the eta threshold is inclusive and one-sided") {
        const Decomposition dec = ergodic_decompose(chain, 15);
        const double excess =
            dec.component_finite_box_entropy(0) - mean_entropy(SourceModel{chain});
        CHECK(excess > 0.0);
        CHECK(atypical_density(chain, 15, excess)[14].fraction == 1.0);
        CHECK(atypical_density(chain, 15, std::nextafter(excess, 1.0))[14].fraction == 0.0);
    }
}

TEST_CASE("classical views of the source models") {
    SUBCASE("markov models pass through") {
        const SourceModel model{flip_chain()};
        const ClassicalMarkov view = as_classical(model);
        CHECK(view.flat_transition()[0] == 0.8);
        CHECK(std::string(classical_basis(model)) == "computational");
    }
    SUBCASE("diagonal product states become constant-row chains") {
        const double d[] = {0.9, 0.1};
        const SourceModel model = IIDProduct{DensityOperator(ComplexMatrix::diagonal(d))};
        const ClassicalMarkov view = as_classical(model);
        CHECK(view.flat_transition() == std::vector<double>{0.9, 0.1, 0.9, 0.1});
        CHECK(std::string(classical_basis(model)) == "computational");
        CHECK(ergodic_decompose(view, 3).k() == 1);
    }
    SUBCASE("dense product states use their eigenbasis") {
        const SourceModel model = IIDProduct{DensityOperator(ComplexMatrix::from_rows(
            {{Complex(0.7, 0.0), Complex(0.2, 0.0)}, {Complex(0.2, 0.0), Complex(0.3, 0.0)}}))};
        const ClassicalMarkov view = as_classical(model);
        // [DERIVED] site eigenvalues 0.5 +/- sqrt(0.08)
        CHECK(view.flat_transition()[0] == doctest::Approx(0.7828427124746190).epsilon(1e-12));
        CHECK(view.flat_transition()[3] == doctest::Approx(0.2171572875253810).epsilon(1e-12));
        CHECK(std::string(classical_basis(model)) == "eigenbasis");
    }
    SUBCASE("dressed models contribute their base chain") {
        const double h = 1.0 / std::sqrt(2.0);
        const SourceModel model = DressedMarkov(
            flip_chain(), ComplexMatrix::from_rows({{Complex(h, 0), Complex(h, 0)},
                                                    {Complex(h, 0), Complex(-h, 0)}}));
        CHECK(as_classical(model).flat_transition()[1] == 0.2);
        CHECK(std::string(classical_basis(model)) == "base");
    }
    SUBCASE("pure product states have no irreducible view") {
        const double d[] = {1.0, 0.0};
        const SourceModel model = IIDProduct{DensityOperator(ComplexMatrix::diagonal(d))};
        CHECK_THROWS_AS(as_classical(model), ContractError);
    }
}

TEST_CASE("maximal abelian restrictions") {
    const DensityOperator tilted(ComplexMatrix::from_rows(
        {{Complex(0.7, 0.0), Complex(0.2, 0.0)}, {Complex(0.2, 0.0), Complex(0.3, 0.0)}}));
    SUBCASE("computational restriction dominates the entropy") {
        const EmpiricalDistribution dist =
            maximal_abelian_restriction(tilted, ComplexMatrix::identity(2));
        CHECK(dist.probs[0] == doctest::Approx(0.7).epsilon(1e-14));
        // [DERIVED] H(0.3) > S(tilted) = 0.52328641642631
        CHECK(dist.entropy() == doctest::Approx(0.6108643020548935).epsilon(1e-13));
        CHECK(dist.entropy() >= 0.52328641642631 - 1e-8);
    }
    SUBCASE("the eigenbasis restriction attains the entropy") {
        const EmpiricalDistribution dist = maximal_abelian_restriction_eigen(tilted);
        CHECK(dist.entropy() == doctest::Approx(0.52328641642631).epsilon(1e-12));
    }
    SUBCASE("bases are validated") {
        ComplexMatrix skew = ComplexMatrix::identity(2);
        skew(0, 1) = Complex(0.5, 0.0);
        CHECK_THROWS_AS(maximal_abelian_restriction(tilted, skew), ContractError);
        CHECK_THROWS_AS(maximal_abelian_restriction(tilted, ComplexMatrix::identity(3)),
                        StructuralError);
    }
}
