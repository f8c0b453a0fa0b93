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

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hshadow/estimators.hpp"
#include "hshadow/hadamard.hpp"
#include "hshadow/qcore.hpp"

/// Exact reference values computed from closed forms with dense matrices.
/// Nothing here calls the circuit or sampling code; only qcore primitives
/// and the plain data types are shared.
namespace hshadow::oracle {

struct OracleResult {
    std::string quantity;
    Complex value;
    std::string method;
};

namespace detail {

inline void check_spec(const HadamardSpec &spec) {
    const auto dim = spec.rho.matrix().rows();
    if (spec.u.rows() != dim || spec.u.cols() != dim || !is_unitary(spec.u)) {
        throw ContractViolation("U is not a unitary on the system register");
    }
    if (spec.w && (spec.w->rows() != dim || spec.w->cols() != dim || !is_unitary(*spec.w))) {
        throw ContractViolation("W is not a unitary on the system register");
    }
}

struct Parts {
    ComplexMatrix w;
    ComplexMatrix u;
    const ComplexMatrix &rho;
    Complex phase;
};

inline Parts parts(const HadamardSpec &spec) {
    check_spec(spec);
    return {spec.w ? *spec.w : identity(spec.qubits()), spec.u, spec.rho.matrix(), std::polar(1.0, spec.phi)};
}

inline ComplexMatrix hermitian_observable(const Observable &o, Eigen::Index dim) {
    ComplexMatrix m = dense(o);
    if (m.rows() != dim) {
        throw ContractViolation("observable and state act on different qubit counts");
    }
    if (!is_hermitian(m)) {
        throw ContractViolation("observable is not Hermitian");
    }
    return m;
}

}  // namespace detail

/// ρ(P) from its closed form:
///   ρ(I) = ½(WρW† + UρU†)           ρ(X) = ½(WρW† − UρU†)
///   ρ(Z) = ½(e^{iφ}UρW† + e^{−iφ}WρU†)
///   ρ(Y) = −(i/2)(e^{iφ}UρW† − e^{−iφ}WρU†)
inline ComplexMatrix exact_post_measurement(const HadamardSpec &spec, Pauli p) {
    const auto d = detail::parts(spec);
    const ComplexMatrix wrw = d.w * d.rho * d.w.adjoint();
    const ComplexMatrix uru = d.u * d.rho * d.u.adjoint();
    const ComplexMatrix urw = d.phase * (d.u * d.rho * d.w.adjoint());
    const ComplexMatrix wru = std::conj(d.phase) * (d.w * d.rho * d.u.adjoint());
    switch (p) {
        case Pauli::I:
            return 0.5 * (wrw + uru);
        case Pauli::X:
            return 0.5 * (wrw - uru);
        case Pauli::Y:
            return Complex(0.0, -0.5) * (urw - wru);
        case Pauli::Z:
            return 0.5 * (urw + wru);
    }
    throw UsageError("unknown Pauli");
}

/// Right-hand side of the accessible-quantity table for the auxiliary
/// readout P, with z = e^{iφ} tr(W†OUρ) (O = I when absent):
///   I: ½ tr(O(WρW† + UρU†)), which is tr ρ without O
///   X: ½ tr(O(WρW† − UρU†)), which is 0 without O
///   Y: Im z        Z: Re z
inline Complex exact_table_entry(const HadamardSpec &spec, Pauli p, const std::optional<Observable> &o = std::nullopt) {
    const auto d = detail::parts(spec);
    if (!o) {
        const Complex z = d.phase * (d.w.adjoint() * d.u * d.rho).trace();
        switch (p) {
            case Pauli::I:
                return d.rho.trace();
            case Pauli::X:
                return {0.0, 0.0};
            case Pauli::Y:
                return {z.imag(), 0.0};
            case Pauli::Z:
                return {z.real(), 0.0};
        }
    }
    const ComplexMatrix om = detail::hermitian_observable(*o, d.rho.rows());
    const Complex z = d.phase * (d.w.adjoint() * om * d.u * d.rho).trace();
    switch (p) {
        case Pauli::I:
            return 0.5 * (om * (d.w * d.rho * d.w.adjoint() + d.u * d.rho * d.u.adjoint())).trace();
        case Pauli::X:
            return 0.5 * (om * (d.w * d.rho * d.w.adjoint() - d.u * d.rho * d.u.adjoint())).trace();
        case Pauli::Y:
            return {z.imag(), 0.0};
        case Pauli::Z:
            return {z.real(), 0.0};
    }
    throw UsageError("unknown Pauli");
}

/// The four circuit stages on 1+n qubits: after the first Hadamard (a),
/// after the controlled U and anti-controlled W (b), after the phase gate
/// (c), and after the final Hadamard (out). Each stage applies the explicit
/// gate matrix to the previous one.
struct ChainStates {
    ComplexMatrix a, b, c, out;
};

inline ChainStates appendix_chain(const HadamardSpec &spec) {
    const auto d = detail::parts(spec);
    const Eigen::Index dim = d.rho.rows();
    const ComplexMatrix id = ComplexMatrix::Identity(dim, dim);
    ComplexMatrix h1(2, 2);
    h1 << 1, 1, 1, -1;
    h1 /= std::sqrt(2.0);
    ComplexMatrix zero = ComplexMatrix::Zero(2, 2);
    zero(0, 0) = 1;
    ComplexMatrix one = ComplexMatrix::Zero(2, 2);
    one(1, 1) = 1;
    ComplexMatrix phase_gate = ComplexMatrix::Identity(2, 2);
    phase_gate(1, 1) = d.phase;
    const ComplexMatrix hadamard = kron(h1, id);
    const ComplexMatrix controlled = kron(zero, d.w) + kron(one, d.u);
    const ComplexMatrix phase = kron(phase_gate, id);
    ChainStates s;
    const ComplexMatrix in = kron(zero, d.rho);
    s.a = hadamard * in * hadamard.adjoint();
    s.b = controlled * s.a * controlled.adjoint();
    s.c = phase * s.b * phase.adjoint();
    s.out = hadamard * s.c * hadamard.adjoint();
    return s;
}

/// Output state from the expanded four-block sum
///   ¼ Σ_ab |a⟩⟨b| ⊗ (WρW† + s_b e^{−iφ}WρU† + s_a e^{iφ}UρW† + s_a s_b UρU†)
/// with s_0 = +1 and s_1 = −1.
inline ComplexMatrix one_shot_output(const HadamardSpec &spec) {
    const auto d = detail::parts(spec);
    const Eigen::Index dim = d.rho.rows();
    const ComplexMatrix wrw = d.w * d.rho * d.w.adjoint();
    const ComplexMatrix uru = d.u * d.rho * d.u.adjoint();
    const ComplexMatrix urw = d.phase * (d.u * d.rho * d.w.adjoint());
    const ComplexMatrix wru = std::conj(d.phase) * (d.w * d.rho * d.u.adjoint());
    ComplexMatrix out(2 * dim, 2 * dim);
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
            const double sa = a == 0 ? 1.0 : -1.0;
            const double sb = b == 0 ? 1.0 : -1.0;
            out.block(a * dim, b * dim, dim, dim) = 0.25 * (wrw + sb * wru + sa * urw + sa * sb * uru);
        }
    }
    return out;
}

/// tr(ρ(I)²) = ½(tr ρ² + tr(ρUρU†)) for the standard test.
inline double exact_purity(const HadamardSpec &spec) {
    if (spec.w) {
        throw UsageError("purity closed form applies to the standard test only");
    }
    const auto d = detail::parts(spec);
    return 0.5 * ((d.rho * d.rho).trace().real() + (d.rho * d.u * d.rho * d.u.adjoint()).trace().real());
}

/// tr(ρ̄²) for ρ̄ = mean_i ½(ρ + U_i ρ U_i†): the target of the pooled
/// purity estimator.
inline double exact_pooled_purity(const DensityOperator &rho, const std::vector<ComplexMatrix> &unitaries) {
    if (unitaries.empty()) {
        throw UsageError("no unitaries given");
    }
    const ComplexMatrix &r = rho.matrix();
    ComplexMatrix avg = ComplexMatrix::Zero(r.rows(), r.cols());
    for (const auto &u : unitaries) {
        avg += 0.5 * (r + u * r * u.adjoint());
    }
    avg /= static_cast<double>(unitaries.size());
    return (avg * avg).trace().real();
}

/// Dense Σ α_i U_i, realized independently of the ensemble's own helper.
inline ComplexMatrix lcu_matrix(const LcuEnsemble &ens) {
    const std::size_t n = ens.qubits();
    require_capacity(n);
    ComplexMatrix m = ComplexMatrix::Zero(Eigen::Index{1} << n, Eigen::Index{1} << n);
    for (const auto &t : ens.terms()) {
        if (const auto *u = std::get_if<ComplexMatrix>(&t.unitary)) {
            m += t.alpha * *u;
        } else {
            const auto &evo = std::get<TimeEvolution>(t.unitary);
            m += t.alpha * mat_exp_iht(*evo.hamiltonian, evo.t);
        }
    }
    return m;
}

/// tr(Mρ), or tr(OMρ) with an observable.
inline Complex exact_lcu(const DensityOperator &rho, const LcuEnsemble &ens, const std::optional<Observable> &o = std::nullopt) {
    const ComplexMatrix m = lcu_matrix(ens);
    if (m.rows() != rho.matrix().rows()) {
        throw ContractViolation("ensemble and state act on different qubit counts");
    }
    if (!o) {
        return (m * rho.matrix()).trace();
    }
    return (dense(*o) * m * rho.matrix()).trace();
}

inline Complex exact_trace_u(const DensityOperator &rho, const ComplexMatrix &u) {
    if (u.rows() != rho.matrix().rows()) {
        throw ContractViolation("unitary and state act on different qubit counts");
    }
    return (u * rho.matrix()).trace();
}

/// ⟨λ|ρ|λ⟩ for a (normalized on the fly) pure target.
inline double exact_fidelity(const DensityOperator &rho, const StateVector &lambda) {
    const StateVector v = lambda / lambda.norm();
    return v.dot(rho.matrix() * v).real();
}

inline double exact_energy(const DensityOperator &rho, const PauliSum &h) {
    return (dense(h) * rho.matrix()).trace().real();
}

/// Expected value of the pooled energy estimator: mean over times of
/// tr(H ½(ρ + e^{iHt}ρe^{−iHt})).
inline double exact_energy_estimator(const DensityOperator &rho, const PauliSum &h, std::span<const double> times) {
    if (times.empty()) {
        throw UsageError("no evolution times given");
    }
    const ComplexMatrix hd = dense(h);
    const ComplexMatrix &r = rho.matrix();
    double acc = 0.0;
    for (double t : times) {
        const ComplexMatrix u = mat_exp_iht(h, t);
        acc += 0.5 * (hd * (r + u * r * u.adjoint())).trace().real();
    }
    return acc / static_cast<double>(times.size());
}

/// ⟨λ|ρ(Z)|λ⟩ / cos(E t + φ) for each time: every entry equals the
/// fidelity when λ is an eigenvector with energy E.
inline std::vector<double> exact_fidelity_per_time(const DensityOperator &rho, const PauliSum &h, const StateVector &lambda,
                                                   double energy, std::span<const double> times, double phi) {
    const StateVector v = lambda / lambda.norm();
    std::vector<double> out;
    for (double t : times) {
        const HadamardSpec spec{rho, mat_exp_iht(h, t), std::nullopt, phi};
        const ComplexMatrix z = exact_post_measurement(spec, Pauli::Z);
        out.push_back(v.dot(z * v).real() / std::cos(energy * t + phi));
    }
    return out;
}

/// tr ρ(Z) = Re tr(e^{−iHt2} e^{iHt1} ρ) for each pair.
inline std::vector<double> exact_scan_values(const DensityOperator &rho, const PauliSum &h,
                                             std::span<const std::pair<double, double>> pairs) {
    std::vector<double> out;
    for (const auto &[t1, t2] : pairs) {
        const ComplexMatrix u1 = mat_exp_iht(h, t1);
        const ComplexMatrix u2 = mat_exp_iht(h, t2);
        out.push_back((u2.adjoint() * u1 * rho.matrix()).trace().real());
    }
    return out;
}

}  // namespace hshadow::oracle
