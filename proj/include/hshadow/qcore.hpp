// Copyright 2026 The hshadow Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <Eigen/Dense>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <istream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "hshadow/errors.hpp"

namespace hshadow {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using StateVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Numerical tolerances shared by every validity check in the library.
namespace tolerance {
inline constexpr double kHermitian = 1e-10;
inline constexpr double kTrace = 1e-10;
inline constexpr double kPositivity = 1e-10;
inline constexpr double kProbability = 1e-10;
inline constexpr double kUnitary = 1e-9;
inline constexpr double kEigenpair = 1e-8;
}  // namespace tolerance

/// Largest register the dense simulator accepts.
inline constexpr std::size_t kMaxQubits = 12;

inline constexpr bool is_power_of_two(std::size_t v) {
    return v != 0 && (v & (v - 1)) == 0;
}

/// Number of qubits of a square 2^k matrix; throws if the shape is wrong.
inline std::size_t qubit_count(const ComplexMatrix &m) {
    if (m.rows() != m.cols() || !is_power_of_two(static_cast<std::size_t>(m.rows()))) {
        throw ContractViolation(
            "matrix of shape " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
            " is not a square power-of-two operator");
    }
    return static_cast<std::size_t>(std::countr_zero(static_cast<std::size_t>(m.rows())));
}

inline void require_capacity(std::size_t qubits) {
    if (qubits > kMaxQubits) {
        throw CapacityError(
            std::to_string(qubits) + " qubits exceeds the dense limit of " + std::to_string(kMaxQubits));
    }
}

inline ComplexMatrix identity(std::size_t qubits) {
    auto dim = Eigen::Index{1} << qubits;
    return ComplexMatrix::Identity(dim, dim);
}

inline double max_abs(const ComplexMatrix &m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline bool is_hermitian(const ComplexMatrix &m, double tol = tolerance::kHermitian) {
    return m.rows() == m.cols() && max_abs(m - m.adjoint()) <= tol;
}

/// ‖U U† − I‖_max ≤ tol.
inline bool is_unitary(const ComplexMatrix &u, double tol = tolerance::kUnitary) {
    if (u.rows() != u.cols()) {
        return false;
    }
    ComplexMatrix prod = u * u.adjoint();
    prod -= ComplexMatrix::Identity(u.rows(), u.cols());
    return max_abs(prod) <= tol;
}

inline ComplexMatrix kron(const ComplexMatrix &a, const ComplexMatrix &b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

/// i^k for integer k.
inline Complex i_pow(unsigned k) {
    switch (k & 3U) {
        case 0:
            return {1, 0};
        case 1:
            return {0, 1};
        case 2:
            return {-1, 0};
        default:
            return {0, -1};
    }
}

inline int parity(std::uint32_t v) {
    return std::popcount(v) & 1;
}

enum class Pauli : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

inline char to_char(Pauli p) {
    return "IXYZ"[static_cast<int>(p)];
}

inline Pauli pauli_from_char(char c) {
    switch (c) {
        case 'I':
            return Pauli::I;
        case 'X':
            return Pauli::X;
        case 'Y':
            return Pauli::Y;
        case 'Z':
            return Pauli::Z;
        default:
            throw UsageError(std::string("not a Pauli letter: '") + c + "'");
    }
}

inline ComplexMatrix pauli_matrix(Pauli p) {
    ComplexMatrix m(2, 2);
    switch (p) {
        case Pauli::I:
            m << 1, 0, 0, 1;
            break;
        case Pauli::X:
            m << 0, 1, 1, 0;
            break;
        case Pauli::Y:
            m << 0, Complex(0, -1), Complex(0, 1), 0;
            break;
        case Pauli::Z:
            m << 1, 0, 0, -1;
            break;
    }
    return m;
}

/// Bit-mask form of a Hermitian Pauli string, P = i^{|x&z|} X^x Z^z.
/// Qubit q (leftmost letter is q = 0) occupies bit (n - 1 - q) of a basis
/// index, which is the Kronecker ordering used by `dense`.
struct PauliMasks {
    std::uint32_t x = 0;
    std::uint32_t z = 0;

    Complex phase() const {
        return i_pow(static_cast<unsigned>(std::popcount(x & z)));
    }
    bool operator==(const PauliMasks &) const = default;
};

/// out = P · in for a Pauli in mask form.
inline void apply_pauli(const PauliMasks &p, const Complex *in, Complex *out, std::size_t dim) {
    const Complex ph = p.phase();
    for (std::size_t k = 0; k < dim; ++k) {
        const auto kk = static_cast<std::uint32_t>(k);
        out[kk ^ p.x] = parity(p.z & kk) ? -ph * in[k] : ph * in[k];
    }
}

/// tr(P r).
inline Complex pauli_trace(const PauliMasks &p, const ComplexMatrix &r) {
    Complex acc = 0;
    for (Eigen::Index k = 0; k < r.rows(); ++k) {
        const auto kk = static_cast<std::uint32_t>(k);
        const Complex v = r(k, static_cast<Eigen::Index>(kk ^ p.x));
        acc += parity(p.z & kk) ? -v : v;
    }
    return p.phase() * acc;
}

/// ⟨ψ|P|ψ⟩.
inline Complex pauli_expectation(const PauliMasks &p, const StateVector &psi) {
    Complex acc = 0;
    for (Eigen::Index k = 0; k < psi.size(); ++k) {
        const auto kk = static_cast<std::uint32_t>(k);
        const Complex v = std::conj(psi(static_cast<Eigen::Index>(kk ^ p.x))) * psi(k);
        acc += parity(p.z & kk) ? -v : v;
    }
    return p.phase() * acc;
}

class PauliTerm {
   public:
    PauliTerm() = default;
    PauliTerm(double coefficient, std::string letters) : coefficient_(coefficient), letters_(std::move(letters)) {
        for (char c : letters_) {
            pauli_from_char(c);
        }
    }

    double coefficient() const {
        return coefficient_;
    }
    const std::string &letters() const {
        return letters_;
    }
    std::size_t qubits() const {
        return letters_.size();
    }

    /// Number of non-identity letters.
    std::size_t weight() const {
        std::size_t w = 0;
        for (char c : letters_) {
            w += c != 'I';
        }
        return w;
    }

    Pauli letter(std::size_t q) const {
        return pauli_from_char(letters_[q]);
    }

    PauliMasks masks() const {
        PauliMasks m;
        const auto n = letters_.size();
        for (std::size_t q = 0; q < n; ++q) {
            const std::uint32_t bit = 1U << (n - 1 - q);
            switch (letters_[q]) {
                case 'X':
                    m.x |= bit;
                    break;
                case 'Y':
                    m.x |= bit;
                    m.z |= bit;
                    break;
                case 'Z':
                    m.z |= bit;
                    break;
                default:
                    break;
            }
        }
        return m;
    }

   private:
    double coefficient_ = 0.0;
    std::string letters_;
};

class PauliSum {
   public:
    PauliSum() = default;
    explicit PauliSum(std::size_t qubits) : qubits_(qubits) {
    }
    PauliSum(std::size_t qubits, std::vector<PauliTerm> terms) : qubits_(qubits) {
        for (auto &t : terms) {
            add(std::move(t));
        }
    }

    PauliSum &add(PauliTerm term) {
        if (term.qubits() != qubits_) {
            throw ContractViolation(
                "Pauli term '" + term.letters() + "' does not act on " + std::to_string(qubits_) + " qubits");
        }
        terms_.push_back(std::move(term));
        return *this;
    }
    PauliSum &add(double coefficient, std::string letters) {
        return add(PauliTerm(coefficient, std::move(letters)));
    }

    std::size_t qubits() const {
        return qubits_;
    }
    const std::vector<PauliTerm> &terms() const {
        return terms_;
    }
    bool empty() const {
        return terms_.empty();
    }

    /// Σ |c_j|.
    double one_norm() const {
        double s = 0;
        for (const auto &t : terms_) {
            s += std::abs(t.coefficient());
        }
        return s;
    }

    PauliSum scaled(double a) const {
        PauliSum out(qubits_);
        for (const auto &t : terms_) {
            out.add(a * t.coefficient(), t.letters());
        }
        return out;
    }

    /// Concatenation of terms; the dense form is the sum of both dense forms.
    PauliSum operator+(const PauliSum &other) const {
        if (other.qubits_ != qubits_) {
            throw ContractViolation("Pauli sums act on different registers");
        }
        PauliSum out = *this;
        for (const auto &t : other.terms_) {
            out.add(t);
        }
        return out;
    }

   private:
    std::size_t qubits_ = 0;
    std::vector<PauliTerm> terms_;
};

/// Σ_j c_j ⊗_k σ_{letters_j[k]}.
inline ComplexMatrix dense(const PauliSum &p) {
    require_capacity(p.qubits());
    const std::size_t dim = std::size_t{1} << p.qubits();
    ComplexMatrix out = ComplexMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (const auto &term : p.terms()) {
        const auto m = term.masks();
        const Complex ph = term.coefficient() * m.phase();
        for (std::size_t k = 0; k < dim; ++k) {
            const auto kk = static_cast<std::uint32_t>(k);
            out(static_cast<Eigen::Index>(kk ^ m.x), static_cast<Eigen::Index>(k)) += parity(m.z & kk) ? -ph : ph;
        }
    }
    return out;
}

/// Eigen-decomposition of a Hermitian operator with ascending eigenvalues.
struct Spectrum {
    RealVector eigenvalues;
    ComplexMatrix eigenvectors;  // columns

    StateVector eigenvector(std::size_t k) const {
        return eigenvectors.col(static_cast<Eigen::Index>(k));
    }
};

inline Spectrum diagonalize(const ComplexMatrix &h) {
    qubit_count(h);
    if (!is_hermitian(h)) {
        throw ContractViolation("operator is not Hermitian within tolerance");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h);
    if (solver.info() != Eigen::Success) {
        throw NumericalConsistencyError("Hermitian eigensolver did not converge");
    }
    return {solver.eigenvalues(), solver.eigenvectors()};
}

inline Spectrum diagonalize(const PauliSum &h) {
    return diagonalize(dense(h));
}

/// V diag(e^{iλt}) V†.
inline ComplexMatrix exp_i_hermitian(const Spectrum &s, double t) {
    if (!std::isfinite(t)) {
        throw ContractViolation("evolution time is not finite");
    }
    Eigen::VectorXcd phases(s.eigenvalues.size());
    for (Eigen::Index k = 0; k < phases.size(); ++k) {
        phases(k) = std::polar(1.0, s.eigenvalues(k) * t);
    }
    return s.eigenvectors * phases.asDiagonal() * s.eigenvectors.adjoint();
}

inline ComplexMatrix exp_i_hermitian(const ComplexMatrix &h, double t) {
    return exp_i_hermitian(diagonalize(h), t);
}

/// e^{iHt}.
inline ComplexMatrix mat_exp_iht(const PauliSum &h, double t) {
    return exp_i_hermitian(dense(h), t);
}

/// (⟨a| ⊗ I) m (|b⟩ ⊗ I) for a (1+n)-qubit operator with the auxiliary
/// qubit first.
inline ComplexMatrix aux_block(const ComplexMatrix &m, int a, int b) {
    const auto n1 = qubit_count(m);
    if (n1 == 0) {
        throw ContractViolation("operator has no auxiliary qubit to address");
    }
    const Eigen::Index half = m.rows() / 2;
    return m.block(a * half, b * half, half, half);
}

/// Trace over the first (auxiliary) qubit.
inline ComplexMatrix partial_trace_first(const ComplexMatrix &m) {
    return aux_block(m, 0, 0) + aux_block(m, 1, 1);
}

/// A system operator: either a normalized density matrix or one of the
/// non-normalized post-measurement operators ρ(P).
class DensityOperator {
   public:
    /// Validates Hermiticity, unit trace, and positivity.
    static DensityOperator state(ComplexMatrix m) {
        DensityOperator d(std::move(m), true);
        d.validate();
        return d;
    }

    /// Non-normalized operator; Hermiticity is optional since reconstructed
    /// snapshots and ρ(P) are trusted callers.
    static DensityOperator unnormalized(ComplexMatrix m, bool require_hermitian = false) {
        DensityOperator d(std::move(m), false);
        if (require_hermitian && !is_hermitian(d.matrix_)) {
            throw ContractViolation("post-measurement operator is not Hermitian");
        }
        return d;
    }

    static DensityOperator pure(const StateVector &psi) {
        const double norm = psi.norm();
        if (norm == 0.0) {
            throw ContractViolation("zero state vector");
        }
        StateVector v = psi / norm;
        return state(v * v.adjoint());
    }

    static DensityOperator maximally_mixed(std::size_t qubits) {
        require_capacity(qubits);
        const double d = std::ldexp(1.0, static_cast<int>(qubits));
        return DensityOperator(identity(qubits) / d, true);
    }

    /// |0…0⟩⟨0…0|.
    static DensityOperator zero_state(std::size_t qubits) {
        require_capacity(qubits);
        StateVector v = StateVector::Zero(Eigen::Index{1} << qubits);
        v(0) = 1;
        return pure(v);
    }

    /// Marks an operator that is a unit-trace positive operator by
    /// construction (a rescaled diagonal block of a larger state). Rounding
    /// asymmetry is removed; the eigenvalue check is skipped.
    DensityOperator as_state_by_construction() const {
        ComplexMatrix m = 0.5 * (matrix_ + matrix_.adjoint());
        if (std::abs(m.trace().real() - 1.0) > 1e-9) {
            throw NumericalConsistencyError("operator marked as a state does not have unit trace");
        }
        return DensityOperator(std::move(m), true);
    }

    const ComplexMatrix &matrix() const {
        return matrix_;
    }
    std::size_t qubits() const {
        return qubits_;
    }
    bool normalized() const {
        return normalized_;
    }
    Complex trace() const {
        return matrix_.trace();
    }

   private:
    DensityOperator(ComplexMatrix m, bool normalized)
        : matrix_(std::move(m)), qubits_(qubit_count(matrix_)), normalized_(normalized) {
        require_capacity(qubits_);
    }

    void validate() const {
        if (!is_hermitian(matrix_)) {
            throw ContractViolation("density matrix is not Hermitian within 1e-10");
        }
        if (std::abs(matrix_.trace() - Complex(1, 0)) > tolerance::kTrace) {
            throw ContractViolation("density matrix trace differs from 1 by more than 1e-10");
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(matrix_, Eigen::EigenvaluesOnly);
        if (solver.eigenvalues().minCoeff() < -tolerance::kPositivity) {
            throw ContractViolation("density matrix has a negative eigenvalue below -1e-10");
        }
    }

    ComplexMatrix matrix_;
    std::size_t qubits_;
    bool normalized_;
};

using Observable = std::variant<PauliSum, ComplexMatrix>;

inline std::size_t observable_qubits(const Observable &o) {
    if (const auto *p = std::get_if<PauliSum>(&o)) {
        return p->qubits();
    }
    return qubit_count(std::get<ComplexMatrix>(o));
}

inline ComplexMatrix dense(const Observable &o) {
    if (const auto *p = std::get_if<PauliSum>(&o)) {
        return dense(*p);
    }
    return std::get<ComplexMatrix>(o);
}

/// tr(O r).
inline Complex expectation(const ComplexMatrix &o, const ComplexMatrix &r) {
    if (o.rows() != r.rows() || o.cols() != r.cols() || o.rows() != o.cols()) {
        throw ContractViolation("expectation: dimension mismatch");
    }
    return o.cwiseProduct(r.transpose()).sum();
}

inline Complex expectation(const PauliSum &o, const ComplexMatrix &r) {
    if ((Eigen::Index{1} << o.qubits()) != r.rows() || r.rows() != r.cols()) {
        throw ContractViolation("expectation: dimension mismatch");
    }
    Complex acc = 0;
    for (const auto &t : o.terms()) {
        acc += t.coefficient() * pauli_trace(t.masks(), r);
    }
    return acc;
}

inline Complex expectation(const Observable &o, const ComplexMatrix &r) {
    return std::visit([&](const auto &obs) { return expectation(obs, r); }, o);
}

inline Complex expectation(const Observable &o, const DensityOperator &r) {
    return expectation(o, r.matrix());
}

/// Parses one term per line, "coefficient letters". Blank lines and text
/// after '#' are ignored.
inline PauliSum parse_pauli_sum(std::istream &in, const std::string &source = "<pauli>") {
    PauliSum out;
    bool sized = false;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        std::istringstream ls(line);
        std::string coeff_text;
        std::string letters;
        if (!(ls >> coeff_text)) {
            continue;
        }
        if (!(ls >> letters)) {
            throw ConfigError(source, line_no, "expected 'coefficient letters'");
        }
        std::string extra;
        if (ls >> extra) {
            throw ConfigError(source, line_no, "unexpected trailing token '" + extra + "'");
        }
        double c = 0;
        try {
            std::size_t used = 0;
            c = std::stod(coeff_text, &used);
            if (used != coeff_text.size()) {
                throw std::invalid_argument(coeff_text);
            }
        } catch (const std::exception &) {
            throw ConfigError(source, line_no, "bad coefficient '" + coeff_text + "'");
        }
        if (!std::isfinite(c)) {
            throw ConfigError(source, line_no, "coefficient is not finite");
        }
        if (letters.find_first_not_of("IXYZ") != std::string::npos) {
            throw ConfigError(source, line_no, "letters must be drawn from I, X, Y, Z");
        }
        if (!sized) {
            if (letters.size() > kMaxQubits) {
                throw ConfigError(source, line_no, "term acts on more than 12 qubits");
            }
            out = PauliSum(letters.size());
            sized = true;
        } else if (letters.size() != out.qubits()) {
            throw ConfigError(
                source, line_no, "term has " + std::to_string(letters.size()) + " letters, expected " +
                                     std::to_string(out.qubits()));
        }
        out.add(c, letters);
    }
    if (!sized) {
        throw ConfigError(source, line_no, "no Pauli terms found");
    }
    return out;
}

/// Open-chain transverse-field Ising model −J Σ Z_k Z_{k+1} − h Σ X_k.
inline PauliSum tfim(std::size_t qubits, double coupling = 1.0, double field = 1.0) {
    PauliSum h(qubits);
    for (std::size_t k = 0; k + 1 < qubits; ++k) {
        std::string s(qubits, 'I');
        s[k] = 'Z';
        s[k + 1] = 'Z';
        h.add(-coupling, s);
    }
    for (std::size_t k = 0; k < qubits; ++k) {
        std::string s(qubits, 'I');
        s[k] = 'X';
        h.add(-field, s);
    }
    return h;
}

}  // namespace hshadow
