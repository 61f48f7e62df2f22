#ifndef AEPLAB_LINALG_HPP
#define AEPLAB_LINALG_HPP

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace aeplab {

using Complex = std::complex<double>;

// Largest dense matrix side the library will materialize unless the caller
// raises the limit explicitly.  4096^2 complex entries is ~268 MB.
inline constexpr std::size_t kDefaultMaxDim = 4096;

// Dense row-major complex matrix.
class ComplexMatrix {
public:
    ComplexMatrix() = default;
    ComplexMatrix(std::size_t rows, std::size_t cols);  // zero-initialized

    static ComplexMatrix identity(std::size_t n);
    static ComplexMatrix diagonal(std::span<const double> entries);
    static ComplexMatrix from_rows(std::initializer_list<std::initializer_list<Complex>> rows);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    Complex& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const Complex& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<const Complex> data() const { return data_; }
    std::span<Complex> mutable_data() { return data_; }

    ComplexMatrix adjoint() const;
    ComplexMatrix operator*(const ComplexMatrix& rhs) const;
    ComplexMatrix operator+(const ComplexMatrix& rhs) const;
    ComplexMatrix operator-(const ComplexMatrix& rhs) const;
    ComplexMatrix scaled(Complex factor) const;

    Complex trace() const;
    double max_abs() const;
    double max_abs_diff(const ComplexMatrix& other) const;
    // max_ij |a_ij - conj(a_ji)|; zero for exactly Hermitian matrices.
    double hermiticity_defect() const;
    bool all_finite() const;
    bool is_diagonal() const;  // exact: every off-diagonal entry is 0

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Complex> data_;
};

// Kronecker product a (x) b.  Throws CapacityError if either result side
// exceeds max_dim.
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b,
                   std::size_t max_dim = kDefaultMaxDim);

// Hermitian, unit-trace, finite matrix.  Positivity is not rechecked on every
// construction (it is the expensive part); validate_psd() runs the full
// eigenvalue check on demand and is exercised by the tests.
class DensityOperator {
public:
    explicit DensityOperator(ComplexMatrix m);

    std::size_t dim() const { return m_.rows(); }
    const ComplexMatrix& matrix() const { return m_; }

    // Throws ContractError if any eigenvalue is below -1e-10.
    void validate_psd() const;

private:
    ComplexMatrix m_;
};

struct EigenDecomposition {
    std::vector<double> eigenvalues;  // descending
    ComplexMatrix eigenvectors;       // unit columns, same order as eigenvalues
};

// Cyclic Jacobi eigensolver for Hermitian matrices.  Each 2x2 pivot block is
// reduced to a real symmetric block by the phase of the off-diagonal entry and
// then annihilated with the standard stable rotation.  Sweeps stop once the
// off-diagonal Frobenius norm falls below 1e-12 (at most 100 sweeps).
//
// `hermiticity_tol` bounds the accepted asymmetry of the input; the iteration
// itself runs on the Hermitian average (m + m^dagger)/2.
EigenDecomposition hermitian_eig(const ComplexMatrix& m, double hermiticity_tol = 1e-10);

// hermitian_eig specialized to density operators: eigenvalues in
// [-1e-10, 0) are clipped to zero, anything lower throws ContractError, and
// the clipped values are renormalized to sum exactly 1.
EigenDecomposition density_eig(const DensityOperator& rho);

// Trace out every site not listed in `keep`.  `site_dims` are the per-site
// dimensions of the full tensor factorization (product must equal rho.dim()),
// `keep` is a strictly increasing list of site indices.  Kept sites retain
// their relative order.
DensityOperator partial_trace(const DensityOperator& rho,
                              std::span<const std::size_t> site_dims,
                              std::span<const std::size_t> keep);

// Shannon entropy -sum p ln p in nats; entries below 1e-300 contribute 0.
double shannon_entropy(std::span<const double> probs);

// Compensated (Kahan) sum.
double kahan_sum(std::span<const double> values);

}  // namespace aeplab

#endif
