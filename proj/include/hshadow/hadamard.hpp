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
#include <array>
#include <numbers>
#include <optional>
#include <utility>

#include "hshadow/qcore.hpp"
#include "hshadow/random.hpp"

namespace hshadow {

/// One Hadamard-test circuit: system state ρ, controlled unitary U,
/// optional anti-controlled unitary W (identity when absent), and the
/// auxiliary phase gate angle φ.
struct HadamardSpec {
    DensityOperator rho;
    ComplexMatrix u;
    std::optional<ComplexMatrix> w;
    double phi = 0.0;

    std::size_t qubits() const {
        return rho.qubits();
    }

    ComplexMatrix w_or_identity() const {
        return w ? *w : identity(qubits());
    }

    void validate() const {
        if (!rho.normalized()) {
            throw ContractViolation("Hadamard test input state must be normalized");
        }
        const auto dim = rho.matrix().rows();
        if (u.rows() != dim || u.cols() != dim) {
            throw ContractViolation("U does not act on the system register");
        }
        if (!is_unitary(u)) {
            throw ContractViolation("U is not unitary within 1e-9");
        }
        if (w) {
            if (w->rows() != dim || w->cols() != dim) {
                throw ContractViolation("W does not act on the system register");
            }
            if (!is_unitary(*w)) {
                throw ContractViolation("W is not unitary within 1e-9");
            }
        }
        if (!std::isfinite(phi)) {
            throw ContractViolation("phase angle is not finite");
        }
    }

    HadamardSpec with_phi(double new_phi) const {
        HadamardSpec s = *this;
        s.phi = new_phi;
        return s;
    }
};

namespace detail {

/// (W + e^{iφ}U, W − e^{iφ}U): the operators conditioned on auxiliary
/// outcome 0 and 1 after the final Hadamard gate.
inline std::array<ComplexMatrix, 2> branch_operators(const HadamardSpec &spec) {
    const ComplexMatrix w = spec.w_or_identity();
    const ComplexMatrix phased_u = std::polar(1.0, spec.phi) * spec.u;
    return {w + phased_u, w - phased_u};
}

/// ¼ A_a ρ A_b†.
inline ComplexMatrix output_block(const std::array<ComplexMatrix, 2> &branches, const ComplexMatrix &rho, int a, int b) {
    return 0.25 * (branches[a] * rho * branches[b].adjoint());
}

}  // namespace detail

/// ρ_out on 1+n qubits, auxiliary qubit first.
inline DensityOperator output_state(const HadamardSpec &spec) {
    spec.validate();
    const auto branches = detail::branch_operators(spec);
    const auto half = spec.rho.matrix().rows();
    ComplexMatrix out(2 * half, 2 * half);
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
            out.block(a * half, b * half, half, half) = detail::output_block(branches, spec.rho.matrix(), a, b);
        }
    }
    return DensityOperator::unnormalized(std::move(out)).as_state_by_construction();
}

/// Single-qubit observable read out on the auxiliary qubit for each row of
/// the post-measurement table. I, X and Z are the Pauli matrices. The Y row
/// is labeled so that ⟨Y⟩ = Im tr(e^{iφ}Uρ); that is the transpose of the
/// Pauli-Y matrix (the Y eigenbasis with its outcome labels swapped).
inline ComplexMatrix aux_readout(Pauli p) {
    ComplexMatrix m = pauli_matrix(p);
    if (p == Pauli::Y) {
        m.transposeInPlace();
    }
    return m;
}

/// ρ(P) = tr_aux[(P ⊗ I) ρ_out], returned without normalization.
inline DensityOperator post_measurement(const HadamardSpec &spec, Pauli p) {
    const ComplexMatrix out = output_state(spec).matrix();
    const ComplexMatrix readout = aux_readout(p);
    // tr_aux[(P ⊗ I) Σ |a⟩⟨b| ⊗ B_ab] = Σ_ab P_ba B_ab
    ComplexMatrix acc = ComplexMatrix::Zero(out.rows() / 2, out.cols() / 2);
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
            const Complex coeff = readout(b, a);
            if (coeff != Complex(0, 0)) {
                acc += coeff * aux_block(out, a, b);
            }
        }
    }
    return DensityOperator::unnormalized(std::move(acc));
}

enum class AuxBasis { Z, Y };

inline char to_char(AuxBasis b) {
    return b == AuxBasis::Z ? 'Z' : 'Y';
}

/// Result of one auxiliary-qubit measurement.
struct AuxOutcome {
    AuxBasis basis;
    int sign;  // +1 or -1
    DensityOperator conditional_state;
    double probability;
};

/// Exact outcome distribution of the auxiliary qubit in one basis together
/// with both conditional system states. Built once per circuit so that shot
/// loops only draw signs.
///
/// A Y-basis readout is realized as the Z-basis readout of the same circuit
/// with φ replaced by φ − π/2, which shifts tr ρ(Z) to tr ρ(Y).
class AuxSampler {
   public:
    AuxSampler(const HadamardSpec &spec, AuxBasis basis) : basis_(basis) {
        spec.validate();
        const HadamardSpec shifted = basis == AuxBasis::Z ? spec : spec.with_phi(spec.phi - std::numbers::pi / 2);
        const auto branches = detail::branch_operators(shifted);
        for (int outcome = 0; outcome < 2; ++outcome) {
            ComplexMatrix block = detail::output_block(branches, spec.rho.matrix(), outcome, outcome);
            const double p = block.trace().real();
            if (p < -tolerance::kProbability || p > 1 + tolerance::kProbability) {
                throw NumericalConsistencyError(
                    "auxiliary outcome probability " + std::to_string(p) + " lies outside [0, 1]");
            }
            probability_[outcome] = std::clamp(p, 0.0, 1.0);
            if (probability_[outcome] > kImpossible) {
                conditional_[outcome] =
                    DensityOperator::unnormalized(block / p).as_state_by_construction();
            }
        }
        const double total = probability_[0] + probability_[1];
        if (std::abs(total - 1.0) > tolerance::kProbability) {
            throw NumericalConsistencyError("auxiliary outcome probabilities do not sum to 1");
        }
        // Rounding residue on an impossible outcome must never be drawn.
        for (int outcome = 0; outcome < 2; ++outcome) {
            if (!conditional_[outcome]) {
                probability_[outcome] = 0.0;
                probability_[1 - outcome] = 1.0;
            }
        }
    }

    AuxBasis basis() const {
        return basis_;
    }

    double probability(int sign) const {
        return probability_[index(sign)];
    }

    /// E[sign] = tr ρ(Z), or tr ρ(Y) for the Y basis.
    double expectation() const {
        return probability_[0] - probability_[1];
    }

    const DensityOperator &conditional_state(int sign) const {
        const auto &c = conditional_[index(sign)];
        if (!c) {
            throw NumericalConsistencyError("conditional state requested for an impossible outcome");
        }
        return *c;
    }

    template <class Rng>
    int sample_sign(Rng &rng) const {
        return uniform01(rng) < probability_[0] ? +1 : -1;
    }

    AuxOutcome outcome(int sign) const {
        return {basis_, sign, conditional_state(sign), probability(sign)};
    }

   private:
    static constexpr double kImpossible = 1e-13;

    static int index(int sign) {
        if (sign != 1 && sign != -1) {
            throw UsageError("auxiliary sign must be +1 or -1");
        }
        return sign == 1 ? 0 : 1;
    }

    AuxBasis basis_;
    std::array<double, 2> probability_{};
    std::array<std::optional<DensityOperator>, 2> conditional_;
};

/// Draws the auxiliary outcome of one run of the circuit.
template <class Rng>
AuxOutcome sample_aux(const HadamardSpec &spec, AuxBasis basis, Rng &rng) {
    const AuxSampler sampler(spec, basis);
    return sampler.outcome(sampler.sample_sign(rng));
}

}  // namespace hshadow
