#include "aeplab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>

#include "aeplab/errors.hpp"

namespace aeplab {

// ==== ComplexMatrix =========================================================

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, Complex(0.0, 0.0)) {}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const double> entries) {
    ComplexMatrix m(entries.size(), entries.size());
    for (std::size_t i = 0; i < entries.size(); ++i) m(i, i) = entries[i];
    return m;
}

ComplexMatrix ComplexMatrix::from_rows(
    std::initializer_list<std::initializer_list<Complex>> rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r == 0 ? 0 : rows.begin()->size();
    ComplexMatrix m(r, c);
    std::size_t i = 0;
    for (const auto& row : rows) {
        if (row.size() != c)
            throw StructuralError("from_rows: ragged row " + std::to_string(i));
        std::size_t j = 0;
        for (const Complex& v : row) m(i, j++) = v;
        ++i;
    }
    return m;
}

ComplexMatrix ComplexMatrix::adjoint() const {
    ComplexMatrix out(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) out(j, i) = std::conj((*this)(i, j));
    return out;
}

ComplexMatrix ComplexMatrix::operator*(const ComplexMatrix& rhs) const {
    if (cols_ != rhs.rows_)
        throw StructuralError("matrix product: inner dimensions " + std::to_string(cols_) +
                              " and " + std::to_string(rhs.rows_) + " differ");
    ComplexMatrix out(rows_, rhs.cols_);
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t k = 0; k < cols_; ++k) {
            const Complex a = (*this)(i, k);
            if (a == Complex(0.0, 0.0)) continue;
            for (std::size_t j = 0; j < rhs.cols_; ++j) out(i, j) += a * rhs(k, j);
        }
    }
    return out;
}

ComplexMatrix ComplexMatrix::operator+(const ComplexMatrix& rhs) const {
    if (rows_ != rhs.rows_ || cols_ != rhs.cols_)
        throw StructuralError("matrix sum: shapes differ");
    ComplexMatrix out(rows_, cols_);
    for (std::size_t i = 0; i < data_.size(); ++i) out.data_[i] = data_[i] + rhs.data_[i];
    return out;
}

ComplexMatrix ComplexMatrix::operator-(const ComplexMatrix& rhs) const {
    if (rows_ != rhs.rows_ || cols_ != rhs.cols_)
        throw StructuralError("matrix difference: shapes differ");
    ComplexMatrix out(rows_, cols_);
    for (std::size_t i = 0; i < data_.size(); ++i) out.data_[i] = data_[i] - rhs.data_[i];
    return out;
}

ComplexMatrix ComplexMatrix::scaled(Complex factor) const {
    ComplexMatrix out(rows_, cols_);
    for (std::size_t i = 0; i < data_.size(); ++i) out.data_[i] = data_[i] * factor;
    return out;
}

Complex ComplexMatrix::trace() const {
    Complex t(0.0, 0.0);
    const std::size_t n = std::min(rows_, cols_);
    for (std::size_t i = 0; i < n; ++i) t += (*this)(i, i);
    return t;
}

double ComplexMatrix::max_abs() const {
    double m = 0.0;
    for (const Complex& v : data_) m = std::max(m, std::abs(v));
    return m;
}

double ComplexMatrix::max_abs_diff(const ComplexMatrix& other) const {
    if (rows_ != other.rows_ || cols_ != other.cols_)
        throw StructuralError("max_abs_diff: shapes differ");
    double m = 0.0;
    for (std::size_t i = 0; i < data_.size(); ++i)
        m = std::max(m, std::abs(data_[i] - other.data_[i]));
    return m;
}

double ComplexMatrix::hermiticity_defect() const {
    if (rows_ != cols_) throw StructuralError("hermiticity_defect: matrix not square");
    double m = 0.0;
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = i; j < cols_; ++j)
            m = std::max(m, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
    return m;
}

bool ComplexMatrix::all_finite() const {
    for (const Complex& v : data_)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    return true;
}

bool ComplexMatrix::is_diagonal() const {
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j)
            if (i != j && (*this)(i, j) != Complex(0.0, 0.0)) return false;
    return true;
}

// ==== kron ==================================================================

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b, std::size_t max_dim) {
    const std::size_t rows = a.rows() * b.rows();
    const std::size_t cols = a.cols() * b.cols();
    if (rows > max_dim || cols > max_dim)
        throw CapacityError("kron: result shape " + std::to_string(rows) + "x" +
                            std::to_string(cols) + " exceeds capacity " +
                            std::to_string(max_dim));
    ComplexMatrix out(rows, cols);
    for (std::size_t ia = 0; ia < a.rows(); ++ia)
        for (std::size_t ja = 0; ja < a.cols(); ++ja) {
            const Complex f = a(ia, ja);
            if (f == Complex(0.0, 0.0)) continue;
            for (std::size_t ib = 0; ib < b.rows(); ++ib)
                for (std::size_t jb = 0; jb < b.cols(); ++jb)
                    out(ia * b.rows() + ib, ja * b.cols() + jb) = f * b(ib, jb);
        }
    return out;
}

// ==== DensityOperator =======================================================

DensityOperator::DensityOperator(ComplexMatrix m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols())
        throw StructuralError("density operator: matrix not square");
    if (m_.rows() == 0) throw StructuralError("density operator: empty matrix");
    if (!m_.all_finite())
        throw ContractError("density operator: non-finite entries");
    const double defect = m_.hermiticity_defect();
    if (defect > 1e-10)
        throw ContractError("density operator: hermiticity defect " + std::to_string(defect));
    const Complex t = m_.trace();
    if (std::abs(t - Complex(1.0, 0.0)) > 1e-10)
        throw ContractError("density operator: trace " + std::to_string(t.real()) + "+" +
                            std::to_string(t.imag()) + "i differs from 1");
}

void DensityOperator::validate_psd() const {
    density_eig(*this);  // throws on eigenvalues below -1e-10
}

// ==== Jacobi eigensolver ====================================================

namespace {

double offdiag_frobenius(const ComplexMatrix& a) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            if (i != j) sum += std::norm(a(i, j));
    return std::sqrt(sum);
}

// One Jacobi rotation annihilating a(p,q).  The complex off-diagonal entry is
// first absorbed into a phase u = a_pq/|a_pq| carried by column q, which
// reduces the pivot block to the real symmetric case of Golub & Van Loan.
void rotate(ComplexMatrix& a, ComplexMatrix& v, std::size_t p, std::size_t q) {
    const Complex apq = a(p, q);
    const double beta = std::abs(apq);
    if (beta < 1e-300) return;
    const Complex u = apq / beta;  // phase factor

    const double app = a(p, p).real();
    const double aqq = a(q, q).real();
    const double tau = (aqq - app) / (2.0 * beta);
    const double t = (tau >= 0.0) ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                  : 1.0 / (tau - std::sqrt(1.0 + tau * tau));
    const double c = 1.0 / std::sqrt(1.0 + t * t);
    const double s = t * c;

    const std::size_t n = a.rows();
    // Columns p and q of A (rows update by conjugate symmetry afterwards).
    for (std::size_t i = 0; i < n; ++i) {
        const Complex aip = a(i, p);
        const Complex aiq = a(i, q) * std::conj(u);
        a(i, p) = c * aip - s * aiq;
        a(i, q) = (s * aip + c * aiq) * u;
    }
    for (std::size_t j = 0; j < n; ++j) {
        const Complex apj = a(p, j);
        const Complex aqj = u * a(q, j);
        a(p, j) = c * apj - s * aqj;
        a(q, j) = std::conj(u) * (s * apj + c * aqj);
    }
    a(p, p) = Complex(app - t * beta, 0.0);
    a(q, q) = Complex(aqq + t * beta, 0.0);
    a(p, q) = Complex(0.0, 0.0);
    a(q, p) = Complex(0.0, 0.0);

    for (std::size_t i = 0; i < n; ++i) {
        const Complex vip = v(i, p);
        const Complex viq = v(i, q) * std::conj(u);
        v(i, p) = c * vip - s * viq;
        v(i, q) = (s * vip + c * viq) * u;
    }
}

}  // namespace

EigenDecomposition hermitian_eig(const ComplexMatrix& m, double hermiticity_tol) {
    if (m.rows() != m.cols()) throw StructuralError("hermitian_eig: matrix not square");
    if (m.rows() == 0) throw StructuralError("hermitian_eig: empty matrix");
    if (!m.all_finite()) throw ContractError("hermitian_eig: non-finite entries");
    const double defect = m.hermiticity_defect();
    if (defect > hermiticity_tol)
        throw ContractError("hermitian_eig: hermiticity defect " + std::to_string(defect) +
                            " exceeds tolerance " + std::to_string(hermiticity_tol));

    const std::size_t n = m.rows();
    // Iterate on the exactly Hermitian average.
    ComplexMatrix a(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            a(i, j) = 0.5 * (m(i, j) + std::conj(m(j, i)));
    ComplexMatrix v = ComplexMatrix::identity(n);

    constexpr double kOffTol = 1e-12;
    constexpr int kMaxSweeps = 100;
    bool converged = offdiag_frobenius(a) <= kOffTol;
    for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
        for (std::size_t p = 0; p + 1 < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) rotate(a, v, p, q);
        converged = offdiag_frobenius(a) <= kOffTol;
    }
    if (!converged)
        throw NumericalError("hermitian_eig: off-diagonal norm " +
                             std::to_string(offdiag_frobenius(a)) + " after " +
                             std::to_string(kMaxSweeps) + " sweeps");

    // Sort descending; ties keep the lower original column first.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<double> diag(n);
    for (std::size_t i = 0; i < n; ++i) diag[i] = a(i, i).real();
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return diag[x] > diag[y]; });

    EigenDecomposition out;
    out.eigenvalues.resize(n);
    out.eigenvectors = ComplexMatrix(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        out.eigenvalues[k] = diag[order[k]];
        for (std::size_t i = 0; i < n; ++i) out.eigenvectors(i, k) = v(i, order[k]);
    }
    return out;
}

EigenDecomposition density_eig(const DensityOperator& rho) {
    EigenDecomposition eig = hermitian_eig(rho.matrix());
    double sum = 0.0;
    for (double& lambda : eig.eigenvalues) {
        if (lambda < -1e-10)
            throw ContractError("density_eig: eigenvalue " + std::to_string(lambda) +
                                " below -1e-10");
        if (lambda < 0.0) lambda = 0.0;
        sum += lambda;
    }
    if (sum <= 0.0) throw NumericalError("density_eig: spectrum sums to zero");
    for (double& lambda : eig.eigenvalues) lambda /= sum;
    return eig;
}

// ==== partial trace =========================================================

DensityOperator partial_trace(const DensityOperator& rho,
                              std::span<const std::size_t> site_dims,
                              std::span<const std::size_t> keep) {
    std::size_t full = 1;
    for (std::size_t d : site_dims) {
        if (d == 0) throw StructuralError("partial_trace: zero site dimension");
        full *= d;
    }
    if (full != rho.dim())
        throw StructuralError("partial_trace: site dimensions multiply to " +
                              std::to_string(full) + ", state has dim " +
                              std::to_string(rho.dim()));
    const std::size_t sites = site_dims.size();
    std::vector<bool> kept(sites, false);
    for (std::size_t k : keep) {
        if (k >= sites)
            throw StructuralError("partial_trace: keep index " + std::to_string(k) +
                                  " out of range for " + std::to_string(sites) + " sites");
        if (kept[k]) throw StructuralError("partial_trace: duplicate keep index");
        kept[k] = true;
    }

    // Row-major strides; site 0 is the most significant digit (kron order).
    std::vector<std::size_t> stride(sites, 1);
    for (std::size_t i = sites; i-- > 1;) stride[i - 1] = stride[i] * site_dims[i];

    std::vector<std::size_t> keep_sites, trace_sites;
    for (std::size_t i = 0; i < sites; ++i) (kept[i] ? keep_sites : trace_sites).push_back(i);

    // Full-index offsets contributed by every kept multi-index and every
    // traced multi-index; the sum of one of each is a full basis index.
    auto offsets = [&](const std::vector<std::size_t>& subset) {
        std::size_t count = 1;
        for (std::size_t s : subset) count *= site_dims[s];
        std::vector<std::size_t> out(count, 0);
        for (std::size_t idx = 0; idx < count; ++idx) {
            std::size_t rem = idx, off = 0;
            for (std::size_t pos = subset.size(); pos-- > 0;) {
                const std::size_t s = subset[pos];
                off += (rem % site_dims[s]) * stride[s];
                rem /= site_dims[s];
            }
            out[idx] = off;
        }
        return out;
    };
    const std::vector<std::size_t> keep_off = offsets(keep_sites);
    const std::vector<std::size_t> trace_off = offsets(trace_sites);

    const ComplexMatrix& src = rho.matrix();
    ComplexMatrix out(keep_off.size(), keep_off.size());
    for (std::size_t i = 0; i < keep_off.size(); ++i)
        for (std::size_t j = 0; j < keep_off.size(); ++j) {
            Complex acc(0.0, 0.0);
            for (std::size_t t : trace_off) acc += src(keep_off[i] + t, keep_off[j] + t);
            out(i, j) = acc;
        }
    return DensityOperator(std::move(out));
}

// ==== scalar helpers ========================================================

double shannon_entropy(std::span<const double> probs) {
    std::vector<double> terms;
    terms.reserve(probs.size());
    for (double p : probs) {
        if (p < 0.0 && p > -1e-12) p = 0.0;
        if (p < 0.0) throw ContractError("shannon_entropy: negative probability");
        terms.push_back(p < 1e-300 ? 0.0 : -p * std::log(p));
    }
    return kahan_sum(terms);
}

double kahan_sum(std::span<const double> values) {
    double sum = 0.0, comp = 0.0;
    for (double v : values) {
        const double y = v - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    return sum;
}

}  // namespace aeplab
