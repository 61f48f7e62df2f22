#ifndef AEPLAB_ERGODIC_HPP
#define AEPLAB_ERGODIC_HPP

#include <vector>

#include "aeplab/aep.hpp"
#include "aeplab/linalg.hpp"
#include "aeplab/source_model.hpp"

namespace aeplab {

// Period of an irreducible chain: gcd of all cycle lengths.
std::size_t chain_period(const ClassicalMarkov& chain);

// Largest sublattice spacing the decomposition routines accept.  Bounds the
// cost of the l-step reachability computation; laboratory runs stay far below.
inline constexpr std::size_t kMaxSublatticeSpacing = 64;

// One ergodic component of the chain state under the spacing-l sublattice
// shift: the stationary law conditioned on a closed class of the l-step
// chain.
struct ErgodicComponent {
    std::size_t index = 0;                // position x in the cyclic order
    std::vector<std::size_t> states;      // member states, ascending
    std::vector<double> start;            // conditioned stationary law, full length d
};

// Self-checks performed by ergodic_decompose (all must pass construction):
//   mixture_defect:    max-norm defect of (1/k) sum_x start_x = pi
//   translate_defect:  max-norm defect of start_x P = start_{x+1 mod k}
//   word_defect:       mixture identity on word distributions up to depth
//                      word_depth = min(3l, enumeration budget)
struct DecompositionDiagnostics {
    double mixture_defect = 0.0;
    double translate_defect = 0.0;
    double word_defect = 0.0;
    std::size_t word_depth = 0;
};

class Decomposition {
public:
    Decomposition(ClassicalMarkov chain, std::size_t l);

    const ClassicalMarkov& chain() const { return chain_; }
    std::size_t l() const { return l_; }
    std::size_t k() const { return components_.size(); }
    std::size_t period() const { return period_; }
    bool k_divides_l() const { return l_ % k() == 0; }
    const std::vector<ErgodicComponent>& components() const { return components_; }
    const DecompositionDiagnostics& diagnostics() const { return diagnostics_; }

    // Distribution of the d^m words a_0..a_{m-1} under component x.
    std::vector<double> component_word_distribution(std::size_t x, std::size_t m) const;

    // Dynamical entropy of component x under the spacing-l shift, in nats per
    // l-block: the conditional entropy of the second l-block given the first.
    double component_entropy_rate_Gl(std::size_t x) const;

    // Finite-box entropy density s_x^(l) = H_x(l-block) / l, nats per site.
    double component_finite_box_entropy(std::size_t x) const;

private:
    ClassicalMarkov chain_;
    std::size_t l_ = 0;
    std::size_t period_ = 0;
    std::vector<ErgodicComponent> components_;
    DecompositionDiagnostics diagnostics_;
};

Decomposition ergodic_decompose(const ClassicalMarkov& chain, std::size_t l);

// Equality check of the component entropies against l * s.
struct ComponentEntropyReport {
    std::size_t l = 0;
    std::size_t k = 0;
    std::vector<double> rates;        // entropy_rate_Gl per component
    double reference = 0.0;           // l * mean entropy of the chain
    double max_pairwise_diff = 0.0;
    double max_reference_diff = 0.0;
    bool equal = false;               // both diffs <= 1e-8
};

ComponentEntropyReport component_entropy_check(const ClassicalMarkov& chain, std::size_t l);

// Fraction of components whose finite-box entropy density exceeds the mean
// entropy by at least eta: s_x^(l) >= s + eta (inclusive threshold).
struct AtypicalRow {
    std::size_t l = 0;
    std::size_t k = 0;
    std::vector<double> finite_box_entropies;  // s_x^(l) per component
    std::size_t atypical_count = 0;
    double fraction = 0.0;
};

std::vector<AtypicalRow> atypical_density(const ClassicalMarkov& chain, std::size_t l_max,
                                          double eta);

// View of a source as the classical chain its decomposition acts on:
// markov models pass through, product states become the chain with identical
// rows given by the site spectrum, dressed models contribute their base
// chain (the decomposition statement is basis-covariant).  Fails with
// ContractError when the resulting chain is not irreducible (e.g. a pure
// product state).
ClassicalMarkov as_classical(const SourceModel& model);

// Which basis the classical view lives in: "computational", "eigenbasis"
// (non-diagonal product states) or "base" (dressed models).
const char* classical_basis(const SourceModel& model);

// Restriction of a state to the maximal abelian algebra spanned by the given
// orthonormal basis: the diagonal <b_i| rho |b_i> as a distribution.  Its
// entropy dominates S(rho), with equality on the eigenbasis.
EmpiricalDistribution maximal_abelian_restriction(const DensityOperator& rho,
                                                  const ComplexMatrix& basis);

// Same restriction in the eigenbasis of rho itself.
EmpiricalDistribution maximal_abelian_restriction_eigen(const DensityOperator& rho);

}  // namespace aeplab

#endif
