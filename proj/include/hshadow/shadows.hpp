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

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "hshadow/clifford.hpp"
#include "hshadow/qcore.hpp"
#include "hshadow/random.hpp"
#include "hshadow/stats.hpp"

namespace hshadow {

/// Aux records carry no system measurement (the auxiliary qubit alone was
/// read out).
enum class ShadowScheme { None, LocalPauli, GlobalClifford };

inline std::string to_string(ShadowScheme s) {
    switch (s) {
        case ShadowScheme::LocalPauli:
            return "local";
        case ShadowScheme::GlobalClifford:
            return "global";
        case ShadowScheme::None:
            break;
    }
    return "aux";
}

inline ShadowScheme parse_scheme(const std::string &s) {
    if (s == "local") {
        return ShadowScheme::LocalPauli;
    }
    if (s == "global") {
        return ShadowScheme::GlobalClifford;
    }
    if (s == "aux") {
        return ShadowScheme::None;
    }
    throw UsageError("unknown shadow scheme '" + s + "' (expected local, global or aux)");
}

/// One measurement record.
struct Snapshot {
    ShadowScheme scheme = ShadowScheme::None;
    std::size_t qubits = 0;
    std::string bases;                        // LocalPauli: one of X, Y, Z per qubit
    std::optional<CliffordTableau> clifford;  // GlobalClifford: state-preparation Clifford V
    std::uint32_t outcome = 0;                // qubit q is bit (qubits - 1 - q)
    int aux_sign = 0;                         // +1, -1, or 0 when the auxiliary qubit was traced out
    double phi = 0.0;
    std::size_t term_index = 0;

    bool operator==(const Snapshot &) const = default;

    int outcome_bit(std::size_t q) const {
        return static_cast<int>((outcome >> (qubits - 1 - q)) & 1U);
    }
};

namespace detail {

inline ComplexMatrix rotation_to_z(Pauli basis) {
    const double r = 1.0 / std::sqrt(2.0);
    ComplexMatrix g(2, 2);
    switch (basis) {
        case Pauli::X:
            g << r, r, r, -r;
            break;
        case Pauli::Y:
            // H·S†
            g << r, Complex(0, -r), r, Complex(0, r);
            break;
        default:
            g << 1, 0, 0, 1;
            break;
    }
    return g;
}

/// Single-qubit gate g applied on qubit q as m → G m G†.
inline void conjugate_single_qubit(ComplexMatrix &m, const ComplexMatrix &g, std::size_t q, std::size_t qubits) {
    const Eigen::Index bit = Eigen::Index{1} << (qubits - 1 - q);
    const Eigen::Index dim = m.rows();
    const Complex g00 = g(0, 0), g01 = g(0, 1), g10 = g(1, 0), g11 = g(1, 1);
    for (Eigen::Index i = 0; i < dim; ++i) {
        if (i & bit) {
            continue;
        }
        for (Eigen::Index c = 0; c < dim; ++c) {
            const Complex a = m(i, c), b = m(i | bit, c);
            m(i, c) = g00 * a + g01 * b;
            m(i | bit, c) = g10 * a + g11 * b;
        }
    }
    for (Eigen::Index c = 0; c < dim; ++c) {
        if (c & bit) {
            continue;
        }
        for (Eigen::Index r = 0; r < dim; ++r) {
            const Complex a = m(r, c), b = m(r, c | bit);
            m(r, c) = a * std::conj(g00) + b * std::conj(g01);
            m(r, c | bit) = a * std::conj(g10) + b * std::conj(g11);
        }
    }
}

/// Cumulative distribution from raw Born probabilities.
inline std::vector<double> born_cumulative(const std::vector<double> &p) {
    std::vector<double> cumulative(p.size());
    double acc = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
        if (p[k] < -tolerance::kProbability || p[k] > 1 + tolerance::kProbability) {
            throw NumericalConsistencyError("Born probability " + std::to_string(p[k]) + " lies outside [0, 1]");
        }
        acc += std::clamp(p[k], 0.0, 1.0);
        cumulative[k] = acc;
    }
    if (std::abs(acc - 1.0) > 1e-9) {
        throw NumericalConsistencyError("Born probabilities sum to " + std::to_string(acc));
    }
    return cumulative;
}

inline Pauli basis_letter(std::size_t digit) {
    static constexpr Pauli kLetters[3] = {Pauli::X, Pauli::Y, Pauli::Z};
    return kLetters[digit];
}

}  // namespace detail

/// Exact outcome distribution of σ ∈ {X,Y,Z}^{⊗n} measurements of one
/// state. For n ≤ 4 all 3^n distributions are tabulated up front.
class LocalPauliSampler {
   public:
    explicit LocalPauliSampler(const DensityOperator &state) : state_(state), qubits_(state.qubits()) {
        if (!state.normalized()) {
            throw ContractViolation("shadow input state must be normalized");
        }
        settings_ = 1;
        for (std::size_t q = 0; q < qubits_; ++q) {
            settings_ *= 3;
        }
        if (qubits_ <= kTabulatedQubits) {
            table_.reserve(settings_);
            for (std::size_t s = 0; s < settings_; ++s) {
                table_.push_back(cumulative_for(setting_letters(s)));
            }
        }
    }

    std::size_t qubits() const {
        return qubits_;
    }

    /// Outcome probabilities for a fixed basis string.
    std::vector<double> distribution(const std::string &bases) const {
        std::vector<double> cumulative = cumulative_for(bases);
        std::vector<double> p(cumulative.size());
        double prev = 0.0;
        for (std::size_t k = 0; k < p.size(); ++k) {
            p[k] = cumulative[k] - prev;
            prev = cumulative[k];
        }
        return p;
    }

    template <class Rng>
    Snapshot sample(Rng &rng) const {
        Snapshot s;
        s.scheme = ShadowScheme::LocalPauli;
        s.qubits = qubits_;
        const std::size_t setting = static_cast<std::size_t>(uniform_index(rng, settings_));
        s.bases = setting_letters(setting);
        if (qubits_ <= kTabulatedQubits) {
            s.outcome = static_cast<std::uint32_t>(sample_cumulative(rng, table_[setting]));
        } else {
            const auto cumulative = cumulative_for(s.bases);
            s.outcome = static_cast<std::uint32_t>(sample_cumulative(rng, cumulative));
        }
        return s;
    }

   private:
    static constexpr std::size_t kTabulatedQubits = 4;

    std::string setting_letters(std::size_t setting) const {
        std::string letters(qubits_, 'Z');
        for (std::size_t q = qubits_; q-- > 0;) {
            letters[q] = to_char(detail::basis_letter(setting % 3));
            setting /= 3;
        }
        return letters;
    }

    std::vector<double> cumulative_for(const std::string &bases) const {
        if (bases.size() != qubits_) {
            throw UsageError("basis string length differs from the qubit count");
        }
        ComplexMatrix m = state_.matrix();
        for (std::size_t q = 0; q < qubits_; ++q) {
            const Pauli b = pauli_from_char(bases[q]);
            if (b == Pauli::I) {
                throw UsageError("local shadow bases must be X, Y or Z");
            }
            if (b != Pauli::Z) {
                detail::conjugate_single_qubit(m, detail::rotation_to_z(b), q, qubits_);
            }
        }
        std::vector<double> p(static_cast<std::size_t>(m.rows()));
        for (Eigen::Index k = 0; k < m.rows(); ++k) {
            p[static_cast<std::size_t>(k)] = m(k, k).real();
        }
        return detail::born_cumulative(p);
    }

    DensityOperator state_;
    std::size_t qubits_;
    std::size_t settings_ = 1;
    std::vector<std::vector<double>> table_;
};

/// Measurement of C ρ C† in the computational basis for a uniformly random
/// Clifford C. The record stores V = C† so that outcome b corresponds to the
/// stabilizer state V|b⟩.
class GlobalCliffordSampler {
   public:
    explicit GlobalCliffordSampler(const DensityOperator &state) : state_(state), qubits_(state.qubits()) {
        if (!state.normalized()) {
            throw ContractViolation("shadow input state must be normalized");
        }
        require_capacity(qubits_);
    }

    std::size_t qubits() const {
        return qubits_;
    }

    /// Born distribution p(b) = ⟨b|V†ρV|b⟩ for a fixed Clifford V.
    std::vector<double> distribution(const CliffordTableau &v) const {
        const ComplexMatrix basis = v.unitary();
        const ComplexMatrix &rho = state_.matrix();
        std::vector<double> p(static_cast<std::size_t>(basis.cols()));
        for (Eigen::Index b = 0; b < basis.cols(); ++b) {
            p[static_cast<std::size_t>(b)] = basis.col(b).dot(rho * basis.col(b)).real();
        }
        return p;
    }

    template <class Rng>
    Snapshot sample(Rng &rng) const {
        Snapshot s;
        s.scheme = ShadowScheme::GlobalClifford;
        s.qubits = qubits_;
        CliffordTableau v = CliffordTableau::random(qubits_, rng);
        if (!v.is_valid()) {
            throw NumericalConsistencyError("sampled Clifford tableau failed the commutation check");
        }
        const auto cumulative = detail::born_cumulative(distribution(v));
        s.outcome = static_cast<std::uint32_t>(sample_cumulative(rng, cumulative));
        s.clifford = std::move(v);
        return s;
    }

   private:
    DensityOperator state_;
    std::size_t qubits_;
};

template <class Rng>
Snapshot sample_local_snapshot(const DensityOperator &state, Rng &rng) {
    return LocalPauliSampler(state).sample(rng);
}

template <class Rng>
Snapshot sample_clifford_snapshot(const DensityOperator &state, Rng &rng) {
    return GlobalCliffordSampler(state).sample(rng);
}

namespace detail {

inline void require_system_record(const Snapshot &s) {
    if (s.scheme == ShadowScheme::None) {
        throw UsageError("auxiliary-only record has no system snapshot");
    }
    if (s.scheme == ShadowScheme::LocalPauli && s.bases.size() != s.qubits) {
        throw UsageError("local snapshot basis string length differs from the qubit count");
    }
    if (s.scheme == ShadowScheme::GlobalClifford && (!s.clifford || s.clifford->qubits() != s.qubits)) {
        throw UsageError("global snapshot lacks a Clifford tableau of matching size");
    }
}

}  // namespace detail

/// The stabilizer state V|b⟩ measured by a global snapshot.
inline StateVector snapshot_state(const Snapshot &s) {
    detail::require_system_record(s);
    if (s.scheme != ShadowScheme::GlobalClifford) {
        throw UsageError("snapshot_state applies to global snapshots only");
    }
    return s.clifford->basis_image(s.outcome);
}

/// Inverse measurement channel applied to the observed projector.
inline DensityOperator reconstruct(const Snapshot &s) {
    detail::require_system_record(s);
    if (s.scheme == ShadowScheme::LocalPauli) {
        ComplexMatrix acc = ComplexMatrix::Identity(1, 1);
        for (std::size_t q = 0; q < s.qubits; ++q) {
            const double sign = s.outcome_bit(q) ? -1.0 : 1.0;
            const ComplexMatrix factor =
                0.5 * ComplexMatrix::Identity(2, 2) + 1.5 * sign * pauli_matrix(pauli_from_char(s.bases[q]));
            acc = kron(acc, factor);
        }
        return DensityOperator::unnormalized(std::move(acc));
    }
    const StateVector psi = snapshot_state(s);
    const double d = std::ldexp(1.0, static_cast<int>(s.qubits));
    ComplexMatrix m = (d + 1) * (psi * psi.adjoint());
    m -= ComplexMatrix::Identity(m.rows(), m.cols());
    return DensityOperator::unnormalized(std::move(m));
}

/// Evaluates tr(O · reconstruct(s)) for many snapshots of one observable.
/// Pauli sums under local snapshots are evaluated factor-wise.
class ObservableEvaluator {
   public:
    explicit ObservableEvaluator(Observable o) : observable_(std::move(o)), qubits_(observable_qubits(observable_)) {
        if (const auto *sum = std::get_if<PauliSum>(&observable_)) {
            for (const auto &t : sum->terms()) {
                masks_.push_back(t.masks());
            }
        } else {
            const auto &m = std::get<ComplexMatrix>(observable_);
            if (!is_hermitian(m)) {
                throw ContractViolation("observable is not Hermitian");
            }
        }
    }

    std::size_t qubits() const {
        return qubits_;
    }

    const Observable &observable() const {
        return observable_;
    }

    /// Number of Pauli terms; 0 for a dense observable.
    std::size_t term_count() const {
        return masks_.size();
    }

    double value(const Snapshot &s) const {
        check(s);
        if (const auto *sum = std::get_if<PauliSum>(&observable_)) {
            if (s.scheme == ShadowScheme::LocalPauli) {
                double acc = 0.0;
                for (std::size_t i = 0; i < sum->terms().size(); ++i) {
                    acc += sum->terms()[i].coefficient() * local_term_value(sum->terms()[i], s);
                }
                return acc;
            }
            const StateVector psi = snapshot_state(s);
            const double d = std::ldexp(1.0, static_cast<int>(s.qubits));
            double acc = 0.0;
            for (std::size_t i = 0; i < masks_.size(); ++i) {
                const double c = sum->terms()[i].coefficient();
                const double tr = (masks_[i].x == 0 && masks_[i].z == 0) ? d : 0.0;
                acc += c * ((d + 1) * pauli_expectation(masks_[i], psi).real() - tr);
            }
            return acc;
        }
        const auto &m = std::get<ComplexMatrix>(observable_);
        if (s.scheme == ShadowScheme::GlobalClifford) {
            const StateVector psi = snapshot_state(s);
            const double d = std::ldexp(1.0, static_cast<int>(s.qubits));
            return (d + 1) * psi.dot(m * psi).real() - m.trace().real();
        }
        return expectation(m, reconstruct(s).matrix()).real();
    }

    /// tr(P_i · reconstruct(s)) for Pauli term i, without its coefficient.
    double term_value(std::size_t i, const Snapshot &s) const {
        check(s);
        const auto *sum = std::get_if<PauliSum>(&observable_);
        if (sum == nullptr || i >= masks_.size()) {
            throw UsageError("term index out of range for this observable");
        }
        if (s.scheme == ShadowScheme::LocalPauli) {
            return local_term_value(sum->terms()[i], s);
        }
        const StateVector psi = snapshot_state(s);
        const double d = std::ldexp(1.0, static_cast<int>(s.qubits));
        const double tr = (masks_[i].x == 0 && masks_[i].z == 0) ? d : 0.0;
        return (d + 1) * pauli_expectation(masks_[i], psi).real() - tr;
    }

   private:
    void check(const Snapshot &s) const {
        detail::require_system_record(s);
        if (s.qubits != qubits_) {
            throw ContractViolation("observable and snapshot act on different qubit counts");
        }
    }

    static double local_term_value(const PauliTerm &t, const Snapshot &s) {
        double v = 1.0;
        for (std::size_t q = 0; q < s.qubits; ++q) {
            const char letter = t.letters()[q];
            if (letter == 'I') {
                continue;
            }
            if (letter != s.bases[q]) {
                return 0.0;
            }
            v *= s.outcome_bit(q) ? -3.0 : 3.0;
        }
        return v;
    }

    Observable observable_;
    std::size_t qubits_;
    std::vector<PauliMasks> masks_;
};

/// Per-snapshot values (aux_sign · tr(O ŝ) when signed).
inline std::vector<double> snapshot_values(std::span<const Snapshot> snapshots, const ObservableEvaluator &o, bool signed_values) {
    std::vector<double> v(snapshots.size());
    for (std::size_t j = 0; j < snapshots.size(); ++j) {
        const double x = o.value(snapshots[j]);
        v[j] = signed_values ? static_cast<double>(snapshots[j].aux_sign) * x : x;
    }
    return v;
}

/// Median-of-means shadow estimate of tr(O ρ) (or of tr(O ρ(P)) for signed
/// records).
inline RobustEstimate estimate_with_error(std::span<const Snapshot> snapshots, const Observable &o, std::size_t k_batches, bool signed_values) {
    if (snapshots.empty()) {
        throw UsageError("no snapshots to estimate from");
    }
    const ObservableEvaluator eval(o);
    const auto values = snapshot_values(snapshots, eval, signed_values);
    return median_of_means(values, k_batches);
}

inline double estimate(std::span<const Snapshot> snapshots, const Observable &o, std::size_t k_batches, bool signed_values) {
    return estimate_with_error(snapshots, o, k_batches, signed_values).value;
}

/// Largest weight among the Pauli components tr(P O) / 2^n above cutoff.
inline std::size_t max_pauli_weight(const ComplexMatrix &o, double cutoff = 1e-12) {
    const std::size_t n = qubit_count(o);
    const std::uint32_t dim = 1U << n;
    std::size_t w = 0;
    for (std::uint32_t x = 0; x < dim; ++x) {
        for (std::uint32_t z = 0; z < dim; ++z) {
            const PauliMasks p{x, z};
            if (std::abs(pauli_trace(p, o)) / dim > cutoff) {
                w = std::max<std::size_t>(w, static_cast<std::size_t>(std::popcount(x | z)));
            }
        }
    }
    return w;
}

/// Shadow-norm proxy: 3^w (maximum weight) under local snapshots and
/// tr(O²) under global ones.
inline double shadow_norm_sq(const Observable &o, ShadowScheme scheme) {
    if (scheme == ShadowScheme::LocalPauli) {
        std::size_t w = 0;
        if (const auto *sum = std::get_if<PauliSum>(&o)) {
            for (const auto &t : sum->terms()) {
                if (t.coefficient() != 0.0) {
                    w = std::max(w, t.weight());
                }
            }
        } else {
            w = max_pauli_weight(std::get<ComplexMatrix>(o));
        }
        return std::pow(3.0, static_cast<double>(w));
    }
    if (scheme == ShadowScheme::GlobalClifford) {
        const ComplexMatrix m = dense(o);
        if (!is_hermitian(m)) {
            throw ContractViolation("observable is not Hermitian");
        }
        return (m * m).trace().real();
    }
    throw UsageError("shadow norm needs the local or global scheme");
}

struct ShadowBudget {
    double epsilon = 0.1;
    double delta = 0.01;
    std::size_t m_targets = 1;
    double max_norm_sq = 1.0;
    double constant = 34.0;
};

/// N = ⌈constant · max_norm_sq · ln(2M/δ) / ε²⌉, at least 1.
inline std::size_t budget(const ShadowBudget &b) {
    if (!(b.epsilon > 0.0) || !std::isfinite(b.epsilon)) {
        throw UsageError("budget epsilon must be positive");
    }
    if (!(b.delta > 0.0 && b.delta < 1.0)) {
        throw UsageError("budget delta must lie in (0, 1)");
    }
    if (b.m_targets < 1) {
        throw UsageError("budget needs at least one target");
    }
    if (!(b.max_norm_sq >= 0.0) || !std::isfinite(b.max_norm_sq)) {
        throw UsageError("budget shadow norm must be nonnegative");
    }
    if (!(b.constant > 0.0) || !std::isfinite(b.constant)) {
        throw UsageError("budget constant must be positive");
    }
    const double n = std::ceil(b.constant * b.max_norm_sq * std::log(2.0 * static_cast<double>(b.m_targets) / b.delta) /
                               (b.epsilon * b.epsilon));
    return std::max<std::size_t>(1, static_cast<std::size_t>(n));
}

/// Budget for estimating a Pauli sum term by term under local snapshots: ε
/// shrinks by Σ|c_i| and every term counts as a target.
inline ShadowBudget pauli_sum_budget(const PauliSum &h, double epsilon, double delta, double constant = 34.0) {
    if (h.empty()) {
        throw UsageError("budget of an empty Pauli sum");
    }
    ShadowBudget b;
    b.epsilon = epsilon / h.one_norm();
    b.delta = delta;
    b.m_targets = h.terms().size();
    b.max_norm_sq = shadow_norm_sq(h, ShadowScheme::LocalPauli);
    b.constant = constant;
    return b;
}

/// Mean of tr(ŝ_a ŝ_b) over ordered pairs of distinct local snapshots.
///
/// Per qubit the pair trace tr[(3|e⟩⟨e| − I)(3|f⟩⟨f| − I)] is 5 for equal
/// basis and outcome, −4 for equal basis and opposite outcome, and 1/2 for
/// different bases. For n ≤ 4 the sum runs through a histogram over the 6^n
/// (basis, outcome) keys contracted with that 6×6 table along each qubit.
inline double local_purity_u_statistic(std::span<const Snapshot> snapshots) {
    if (snapshots.size() < 2) {
        throw UsageError("purity needs at least two snapshots");
    }
    const std::size_t n = snapshots.front().qubits;
    auto key_digit = [](const Snapshot &s, std::size_t q) {
        const std::size_t b = s.bases[q] == 'X' ? 0 : (s.bases[q] == 'Y' ? 1 : 2);
        return 2 * b + static_cast<std::size_t>(s.outcome_bit(q));
    };
    auto factor = [](std::size_t a, std::size_t b) {
        if (a / 2 != b / 2) {
            return 0.5;
        }
        return a == b ? 5.0 : -4.0;
    };
    for (const auto &s : snapshots) {
        if (s.scheme != ShadowScheme::LocalPauli || s.qubits != n || s.bases.size() != n) {
            throw UsageError("purity U-statistic needs local snapshots of one register");
        }
    }
    const double count = static_cast<double>(snapshots.size());
    if (n <= 4) {
        std::size_t keys = 1;
        for (std::size_t q = 0; q < n; ++q) {
            keys *= 6;
        }
        std::vector<double> hist(keys, 0.0);
        for (const auto &s : snapshots) {
            std::size_t k = 0;
            for (std::size_t q = 0; q < n; ++q) {
                k = 6 * k + key_digit(s, q);
            }
            hist[k] += 1.0;
        }
        // Apply the 6×6 table along every axis, then contract with hist.
        std::vector<double> acc = hist;
        std::vector<double> next(keys);
        std::size_t stride = 1;
        for (std::size_t axis = 0; axis < n; ++axis, stride *= 6) {
            for (std::size_t k = 0; k < keys; ++k) {
                const std::size_t digit = (k / stride) % 6;
                const std::size_t base = k - digit * stride;
                double v = 0.0;
                for (std::size_t d = 0; d < 6; ++d) {
                    v += factor(digit, d) * acc[base + d * stride];
                }
                next[k] = v;
            }
            acc.swap(next);
        }
        std::vector<double> terms(keys);
        for (std::size_t k = 0; k < keys; ++k) {
            terms[k] = hist[k] * acc[k];
        }
        const double all_pairs = pairwise_sum(terms);
        const double diagonal = count * std::pow(5.0, static_cast<double>(n));
        return (all_pairs - diagonal) / (count * (count - 1));
    }
    std::vector<double> rows(snapshots.size());
    for (std::size_t a = 0; a < snapshots.size(); ++a) {
        double row = 0.0;
        for (std::size_t b = 0; b < snapshots.size(); ++b) {
            if (a == b) {
                continue;
            }
            double v = 1.0;
            for (std::size_t q = 0; q < n; ++q) {
                v *= factor(key_digit(snapshots[a], q), key_digit(snapshots[b], q));
            }
            row += v;
        }
        rows[a] = row;
    }
    return pairwise_sum(rows) / (count * (count - 1));
}

// Snapshot log: one record per line,
//   scheme bases outcome aux_sign phi term_index
// where bases is the X/Y/Z string (local), the tableau hex (global) or "-",
// outcome is the bit string in qubit order or "-", and phi is a C99
// hexadecimal float so that replay is exact.

inline constexpr const char *kSnapshotLogHeader = "# hshadow snapshot log v1";

inline std::string format_hexfloat(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%a", v);
    return buf;
}

inline std::string format_snapshot(const Snapshot &s) {
    std::string out = to_string(s.scheme);
    out += ' ';
    switch (s.scheme) {
        case ShadowScheme::LocalPauli:
            out += s.bases;
            break;
        case ShadowScheme::GlobalClifford:
            out += s.clifford->to_hex();
            break;
        case ShadowScheme::None:
            out += '-';
            break;
    }
    out += ' ';
    if (s.scheme == ShadowScheme::None) {
        out += '-';
    } else {
        for (std::size_t q = 0; q < s.qubits; ++q) {
            out += s.outcome_bit(q) ? '1' : '0';
        }
    }
    out += ' ' + std::to_string(s.aux_sign) + ' ' + format_hexfloat(s.phi) + ' ' + std::to_string(s.term_index);
    return out;
}

inline void write_snapshot_log(std::ostream &out, std::span<const Snapshot> snapshots) {
    out << kSnapshotLogHeader << '\n';
    for (const auto &s : snapshots) {
        out << format_snapshot(s) << '\n';
    }
}

inline Snapshot parse_snapshot(const std::string &line, const std::string &source, std::size_t line_no) {
    std::istringstream in(line);
    std::string scheme, bases, outcome, sign, phi, term, extra;
    if (!(in >> scheme >> bases >> outcome >> sign >> phi >> term) || (in >> extra)) {
        throw ConfigError(source, line_no, "expected six fields: scheme bases outcome aux_sign phi term_index");
    }
    Snapshot s;
    try {
        s.scheme = parse_scheme(scheme);
    } catch (const UsageError &e) {
        throw ConfigError(source, line_no, e.what());
    }
    if (s.scheme != ShadowScheme::None) {
        s.qubits = outcome.size();
        if (s.qubits == 0 || s.qubits > kMaxQubits) {
            throw ConfigError(source, line_no, "outcome bit string has an unsupported length");
        }
        for (char c : outcome) {
            if (c != '0' && c != '1') {
                throw ConfigError(source, line_no, "outcome must be a bit string");
            }
            s.outcome = (s.outcome << 1) | static_cast<std::uint32_t>(c - '0');
        }
        if (s.scheme == ShadowScheme::LocalPauli) {
            if (bases.size() != s.qubits || bases.find_first_not_of("XYZ") != std::string::npos) {
                throw ConfigError(source, line_no, "local bases must be one X, Y or Z per qubit");
            }
            s.bases = bases;
        } else {
            try {
                s.clifford = CliffordTableau::from_hex(s.qubits, bases);
            } catch (const UsageError &e) {
                throw ConfigError(source, line_no, e.what());
            }
        }
    } else if (bases != "-" || outcome != "-") {
        throw ConfigError(source, line_no, "auxiliary-only records use '-' for bases and outcome");
    }
    if (sign == "1") {
        s.aux_sign = 1;
    } else if (sign == "-1") {
        s.aux_sign = -1;
    } else if (sign == "0") {
        s.aux_sign = 0;
    } else {
        throw ConfigError(source, line_no, "aux_sign must be 1, -1 or 0");
    }
    char *end = nullptr;
    s.phi = std::strtod(phi.c_str(), &end);
    if (end == phi.c_str() || *end != '\0' || !std::isfinite(s.phi)) {
        throw ConfigError(source, line_no, "phi is not a finite number");
    }
    if (term.empty() || term.find_first_not_of("0123456789") != std::string::npos) {
        throw ConfigError(source, line_no, "term_index must be a nonnegative integer");
    }
    s.term_index = static_cast<std::size_t>(std::stoull(term));
    return s;
}

inline std::vector<Snapshot> read_snapshot_log(std::istream &in, const std::string &source = "<snapshots>") {
    std::vector<Snapshot> out;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (!header_seen) {
            if (line != kSnapshotLogHeader) {
                throw ConfigError(source, line_no, "missing snapshot log header");
            }
            header_seen = true;
            continue;
        }
        if (line.empty() || line[0] == '#') {
            continue;
        }
        out.push_back(parse_snapshot(line, source, line_no));
    }
    if (!header_seen) {
        throw ConfigError(source, 0, "empty snapshot log");
    }
    return out;
}

}  // namespace hshadow
