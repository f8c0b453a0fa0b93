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
#include <cmath>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "hshadow/hadamard.hpp"
#include "hshadow/parallel.hpp"
#include "hshadow/qcore.hpp"
#include "hshadow/random.hpp"
#include "hshadow/shadows.hpp"
#include "hshadow/stats.hpp"

namespace hshadow {

/// Shot count and stream selection for one estimator run. Shot i always
/// draws from seed_stream(seed, i), whatever the thread count.
struct Sampling {
    std::size_t shots = 0;
    std::uint64_t seed = 0;
    unsigned threads = 1;
};

struct EstimateReport {
    Complex value{0.0, 0.0};
    double std_error = 0.0;
    std::size_t shots_used = 0;
    ShadowScheme scheme = ShadowScheme::None;
    std::vector<std::pair<std::string, double>> breakdown;
};

/// e^{iHt} given by its generator; terms sharing one Hamiltonian object are
/// diagonalized once.
struct TimeEvolution {
    std::shared_ptr<const PauliSum> hamiltonian;
    double t = 0.0;
};

using UnitarySpec = std::variant<ComplexMatrix, TimeEvolution>;

struct LcuTerm {
    Complex alpha;
    UnitarySpec unitary;
};

/// M = Σ α_i U_i with a sampling distribution over the terms.
class LcuEnsemble {
   public:
    /// Importance sampling p_i ∝ |α_i|.
    explicit LcuEnsemble(std::vector<LcuTerm> terms) : terms_(std::move(terms)) {
        if (terms_.empty()) {
            throw UsageError("LCU ensemble has no terms");
        }
        const double norm = one_norm();
        if (!(norm > 0.0)) {
            throw UsageError("LCU ensemble has only zero coefficients");
        }
        for (const auto &t : terms_) {
            probabilities_.push_back(std::abs(t.alpha) / norm);
        }
        validate();
    }

    LcuEnsemble(std::vector<LcuTerm> terms, std::vector<double> probabilities)
        : terms_(std::move(terms)), probabilities_(std::move(probabilities)) {
        validate();
    }

    const std::vector<LcuTerm> &terms() const {
        return terms_;
    }
    const std::vector<double> &probabilities() const {
        return probabilities_;
    }

    double one_norm() const {
        double s = 0.0;
        for (const auto &t : terms_) {
            s += std::abs(t.alpha);
        }
        return s;
    }

    std::size_t qubits() const {
        const auto &u = terms_.front().unitary;
        if (const auto *m = std::get_if<ComplexMatrix>(&u)) {
            return qubit_count(*m);
        }
        return std::get<TimeEvolution>(u).hamiltonian->qubits();
    }

    /// Dense U_i, each checked for unitarity.
    std::vector<ComplexMatrix> unitaries() const {
        std::map<const PauliSum *, Spectrum> spectra;
        std::vector<ComplexMatrix> out;
        out.reserve(terms_.size());
        for (const auto &t : terms_) {
            if (const auto *m = std::get_if<ComplexMatrix>(&t.unitary)) {
                out.push_back(*m);
            } else {
                const auto &evo = std::get<TimeEvolution>(t.unitary);
                auto it = spectra.find(evo.hamiltonian.get());
                if (it == spectra.end()) {
                    it = spectra.emplace(evo.hamiltonian.get(), diagonalize(*evo.hamiltonian)).first;
                }
                out.push_back(exp_i_hermitian(it->second, evo.t));
            }
            if (!is_unitary(out.back())) {
                throw ContractViolation("LCU term is not unitary within 1e-9");
            }
        }
        return out;
    }

    /// Σ α_i e^{iEt_i}: the scalar function the ensemble applies to an
    /// eigenvalue E. Requires every term to be a time evolution.
    Complex response(double energy) const {
        Complex acc{0.0, 0.0};
        for (const auto &t : terms_) {
            const auto *evo = std::get_if<TimeEvolution>(&t.unitary);
            if (evo == nullptr) {
                throw UsageError("response needs time-evolution terms only");
            }
            acc += t.alpha * std::polar(1.0, energy * evo->t);
        }
        return acc;
    }

   private:
    void validate() const {
        if (terms_.empty()) {
            throw UsageError("LCU ensemble has no terms");
        }
        if (probabilities_.size() != terms_.size()) {
            throw UsageError("LCU sampling distribution has the wrong length");
        }
        double total = 0.0;
        for (std::size_t i = 0; i < terms_.size(); ++i) {
            const double p = probabilities_[i];
            if (!(p >= 0.0) || !std::isfinite(p)) {
                throw UsageError("LCU sampling probabilities must be nonnegative");
            }
            if (p == 0.0 && terms_[i].alpha != Complex(0.0, 0.0)) {
                throw UsageError("LCU term " + std::to_string(i) + " has nonzero weight but sampling probability 0");
            }
            total += p;
        }
        if (std::abs(total - 1.0) > 1e-12) {
            throw UsageError("LCU sampling probabilities do not sum to 1");
        }
        const std::size_t n = qubits();
        for (const auto &t : terms_) {
            if (const auto *m = std::get_if<ComplexMatrix>(&t.unitary)) {
                if (qubit_count(*m) != n) {
                    throw ContractViolation("LCU terms act on different qubit counts");
                }
            } else {
                const auto &evo = std::get<TimeEvolution>(t.unitary);
                if (!evo.hamiltonian || evo.hamiltonian->qubits() != n) {
                    throw ContractViolation("LCU terms act on different qubit counts");
                }
                if (!std::isfinite(evo.t)) {
                    throw ContractViolation("LCU evolution time is not finite");
                }
            }
        }
    }

    std::vector<LcuTerm> terms_;
    std::vector<double> probabilities_;
};

/// Target function for build_fourier_filter. Step approximates the
/// projector onto energies below `threshold` by a Gaussian-smoothed Fourier
/// series with odd harmonics up to `order` at spacing `tau`; it is accurate
/// for spectra inside threshold ± π/tau.
struct FilterDescriptor {
    enum class Kind { Constant, Step };
    Kind kind = Kind::Step;
    std::shared_ptr<const PauliSum> hamiltonian;
    double threshold = 0.0;
    double tau = 0.5;
    int order = 15;
    double width = 0.2;
};

inline LcuEnsemble build_fourier_filter(const FilterDescriptor &d) {
    if (!d.hamiltonian) {
        throw UsageError("filter needs a Hamiltonian");
    }
    std::vector<LcuTerm> terms;
    if (d.kind == FilterDescriptor::Kind::Constant) {
        terms.push_back({Complex(1.0, 0.0), TimeEvolution{d.hamiltonian, 0.0}});
        return LcuEnsemble(std::move(terms));
    }
    if (d.order < 1) {
        throw UsageError("filter order must be at least 1 (empty time grid)");
    }
    if (!(d.tau > 0.0) || !std::isfinite(d.tau)) {
        throw UsageError("filter time step must be positive");
    }
    if (!(d.width >= 0.0) || !std::isfinite(d.width) || !std::isfinite(d.threshold)) {
        throw UsageError("filter width must be nonnegative and threshold finite");
    }
    terms.push_back({Complex(0.5, 0.0), TimeEvolution{d.hamiltonian, 0.0}});
    for (int k = -d.order; k <= d.order; ++k) {
        if (k % 2 == 0) {
            continue;
        }
        const double kt = static_cast<double>(k) * d.tau;
        const double damping = std::exp(-0.5 * (kt * d.width) * (kt * d.width));
        const Complex alpha = Complex(0.0, 1.0 / (std::numbers::pi * k)) * damping * std::polar(1.0, -kt * d.threshold);
        terms.push_back({alpha, TimeEvolution{d.hamiltonian, kt}});
    }
    return LcuEnsemble(std::move(terms));
}

namespace detail {

inline void require_shots(const Sampling &s, std::size_t minimum) {
    if (s.shots < minimum) {
        throw UsageError("estimator needs at least " + std::to_string(minimum) + " shots");
    }
}

template <class Fn>
std::vector<Snapshot> run_shots(const Sampling &s, Fn &&shot) {
    std::vector<Snapshot> out(s.shots);
    parallel_for(s.shots, s.threads, [&](std::size_t i) {
        auto rng = seed_stream(s.seed, i);
        out[i] = shot(i, rng);
    });
    return out;
}

/// Snapshot sampler for one conditional state in the chosen scheme.
class StateShadowSampler {
   public:
    StateShadowSampler(const DensityOperator &state, ShadowScheme scheme) {
        if (scheme == ShadowScheme::LocalPauli) {
            local_.emplace(state);
        } else if (scheme == ShadowScheme::GlobalClifford) {
            global_.emplace(state);
        } else {
            throw UsageError("shadow sampler needs the local or global scheme");
        }
    }

    template <class Rng>
    Snapshot sample(Rng &rng) const {
        return local_ ? local_->sample(rng) : global_->sample(rng);
    }

   private:
    std::optional<LocalPauliSampler> local_;
    std::optional<GlobalCliffordSampler> global_;
};

/// Aux sampler plus shadow samplers for both conditional states.
struct ShotCircuit {
    AuxSampler aux;
    std::array<std::optional<StateShadowSampler>, 2> shadows;

    ShotCircuit(const HadamardSpec &spec, ShadowScheme scheme) : aux(spec, AuxBasis::Z) {
        if (scheme == ShadowScheme::None) {
            return;
        }
        for (int sign : {1, -1}) {
            if (aux.probability(sign) > 0.0) {
                shadows[sign == 1 ? 0 : 1].emplace(aux.conditional_state(sign), scheme);
            }
        }
    }

    /// Aux sign and, when a scheme is set, a snapshot of the conditional
    /// state; aux_sign is left as drawn.
    template <class Rng>
    Snapshot run(Rng &rng) const {
        const int sign = aux.sample_sign(rng);
        Snapshot s;
        if (shadows[0] || shadows[1]) {
            s = shadows[sign == 1 ? 0 : 1]->sample(rng);
        }
        s.aux_sign = sign;
        return s;
    }
};

inline std::string time_label(const std::string &name, double t) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s[t=%.6g]", name.c_str(), t);
    return buf;
}

/// Mean and standard error of ±1 outcomes from the binomial variance.
inline std::pair<double, double> sign_mean(std::span<const double> signs) {
    const double m = mean(signs);
    const double var = std::max(0.0, 1.0 - m * m);
    return {m, std::sqrt(var / static_cast<double>(signs.size()))};
}

inline bool is_phase(double phi, double target) {
    return phi == target;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// tr(Uρ)

inline constexpr double kImagPhase = std::numbers::pi / 2;

/// Even shots run φ = 0 (real part), odd shots φ = π/2 (imaginary part).
inline std::vector<Snapshot> collect_trace_u(const DensityOperator &rho, const ComplexMatrix &u, const Sampling &s) {
    detail::require_shots(s, 2);
    const HadamardSpec spec{rho, u, std::nullopt, 0.0};
    const std::array<AuxSampler, 2> aux{AuxSampler(spec, AuxBasis::Z), AuxSampler(spec.with_phi(kImagPhase), AuxBasis::Z)};
    return detail::run_shots(s, [&](std::size_t i, PhiloxStream &rng) {
        Snapshot snap;
        snap.phi = i % 2 == 0 ? 0.0 : kImagPhase;
        snap.aux_sign = aux[i % 2].sample_sign(rng);
        return snap;
    });
}

inline EstimateReport finalize_trace_u(std::span<const Snapshot> records) {
    std::vector<double> re, im;
    for (const auto &r : records) {
        if (detail::is_phase(r.phi, 0.0)) {
            re.push_back(r.aux_sign);
        } else if (detail::is_phase(r.phi, kImagPhase)) {
            im.push_back(r.aux_sign);
        } else {
            throw UsageError("trace record has a phase other than 0 or π/2");
        }
    }
    if (re.empty() || im.empty()) {
        throw UsageError("trace estimate needs records at both phases");
    }
    // E[sign] at φ = π/2 is Re(i·tr Uρ) = −Im tr Uρ.
    const auto [m_re, se_re] = detail::sign_mean(re);
    const auto [m_im, se_im] = detail::sign_mean(im);
    EstimateReport r;
    r.value = Complex(m_re, -m_im);
    r.std_error = std::hypot(se_re, se_im);
    r.shots_used = records.size();
    r.breakdown = {{"re_shots", static_cast<double>(re.size())},
                   {"im_shots", static_cast<double>(im.size())},
                   {"re_std_error", se_re},
                   {"im_std_error", se_im}};
    return r;
}

inline EstimateReport estimate_trace_u(const DensityOperator &rho, const ComplexMatrix &u, const Sampling &s) {
    return finalize_trace_u(collect_trace_u(rho, u, s));
}

// ---------------------------------------------------------------------------
// LCU

/// Each shot draws a term from the ensemble's distribution and alternates
/// φ = 0 / π/2 by shot parity. With an observable, a snapshot of the
/// conditional state is attached.
inline std::vector<Snapshot> collect_lcu(const DensityOperator &rho, const LcuEnsemble &ens, bool with_observable,
                                         ShadowScheme scheme, const Sampling &s) {
    detail::require_shots(s, 2);
    if (ens.qubits() != rho.qubits()) {
        throw ContractViolation("LCU ensemble and state act on different qubit counts");
    }
    const ShadowScheme effective = with_observable ? scheme : ShadowScheme::None;
    if (with_observable && scheme == ShadowScheme::None) {
        throw UsageError("an observable needs the local or global shadow scheme");
    }
    const auto unitaries = ens.unitaries();
    std::vector<std::array<detail::ShotCircuit, 2>> circuits;
    circuits.reserve(unitaries.size());
    for (const auto &u : unitaries) {
        const HadamardSpec spec{rho, u, std::nullopt, 0.0};
        circuits.push_back({detail::ShotCircuit(spec, effective), detail::ShotCircuit(spec.with_phi(kImagPhase), effective)});
    }
    std::vector<double> cumulative(ens.probabilities().size());
    double acc = 0.0;
    for (std::size_t i = 0; i < cumulative.size(); ++i) {
        acc += ens.probabilities()[i];
        cumulative[i] = acc;
    }
    return detail::run_shots(s, [&](std::size_t i, PhiloxStream &rng) {
        const std::size_t term = sample_cumulative(rng, cumulative);
        const std::size_t part = i % 2;
        Snapshot snap = circuits[term][part].run(rng);
        snap.phi = part == 0 ? 0.0 : kImagPhase;
        snap.term_index = term;
        return snap;
    });
}

inline EstimateReport finalize_lcu(std::span<const Snapshot> records, const LcuEnsemble &ens,
                                   const std::optional<Observable> &o) {
    std::optional<ObservableEvaluator> eval;
    if (o) {
        eval.emplace(*o);
    }
    std::array<std::vector<Complex>, 2> parts;
    for (const auto &r : records) {
        if (r.term_index >= ens.terms().size()) {
            throw UsageError("LCU record refers to a missing term");
        }
        const std::size_t part = detail::is_phase(r.phi, 0.0) ? 0 : (detail::is_phase(r.phi, kImagPhase) ? 1 : 2);
        if (part == 2) {
            throw UsageError("LCU record has a phase other than 0 or π/2");
        }
        const double v = static_cast<double>(r.aux_sign) * (eval ? eval->value(r) : 1.0);
        const Complex weight = ens.terms()[r.term_index].alpha / ens.probabilities()[r.term_index];
        // φ = π/2 records measure −Im, which enters the sum as i·Im.
        parts[part].push_back(weight * v * (part == 0 ? Complex(1, 0) : Complex(0, -1)));
    }
    if (parts[0].empty() || parts[1].empty()) {
        throw UsageError("LCU estimate needs records at both phases");
    }
    EstimateReport r;
    double var = 0.0;
    for (const auto &p : parts) {
        std::vector<double> re(p.size()), im(p.size());
        for (std::size_t k = 0; k < p.size(); ++k) {
            re[k] = p[k].real();
            im[k] = p[k].imag();
        }
        const Complex m(mean(re), mean(im));
        r.value += m;
        const double sd_re = sample_sd(re), sd_im = sample_sd(im);
        var += (sd_re * sd_re + sd_im * sd_im) / static_cast<double>(p.size());
    }
    r.std_error = std::sqrt(var);
    r.shots_used = records.size();
    r.scheme = eval && !records.empty() ? records.front().scheme : ShadowScheme::None;
    r.breakdown = {{"one_norm", ens.one_norm()},
                   {"terms", static_cast<double>(ens.terms().size())},
                   {"re_shots", static_cast<double>(parts[0].size())},
                   {"im_shots", static_cast<double>(parts[1].size())}};
    return r;
}

inline EstimateReport estimate_lcu(const DensityOperator &rho, const LcuEnsemble &ens, const std::optional<Observable> &o,
                                   ShadowScheme scheme, const Sampling &s) {
    return finalize_lcu(collect_lcu(rho, ens, o.has_value(), scheme, s), ens, o);
}

// ---------------------------------------------------------------------------
// Fidelity with an eigenstate

inline constexpr double kCosineCutoff = 0.1;

namespace detail {

inline StateVector checked_eigenvector(const PauliSum &h, const StateVector &lambda, double energy) {
    const double norm = lambda.norm();
    if (!(norm > 0.0)) {
        throw ContractViolation("target state is the zero vector");
    }
    const StateVector v = lambda / norm;
    const ComplexMatrix hd = dense(h);
    if (hd.rows() != v.size()) {
        throw ContractViolation("target state and Hamiltonian act on different qubit counts");
    }
    if ((hd * v - energy * v).norm() > tolerance::kEigenpair) {
        throw ContractViolation("target state is not an eigenvector of H with the given energy within 1e-8");
    }
    return v;
}

inline std::vector<std::size_t> informative_times(std::span<const double> times, double energy, double phi) {
    if (times.empty()) {
        throw UsageError("no evolution times given");
    }
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (std::abs(std::cos(energy * times[i] + phi)) >= kCosineCutoff) {
            keep.push_back(i);
        }
    }
    if (keep.empty()) {
        throw NoInformationError("every evolution time has |cos(E t + φ)| below 0.1");
    }
    return keep;
}

}  // namespace detail

/// Shots are assigned round-robin to the informative times; each shot takes
/// a signed global snapshot of the conditional state.
inline std::vector<Snapshot> collect_fidelity(const DensityOperator &rho, const PauliSum &h, const StateVector &lambda,
                                              double energy, std::span<const double> times, double phi, const Sampling &s) {
    detail::checked_eigenvector(h, lambda, energy);
    const auto keep = detail::informative_times(times, energy, phi);
    detail::require_shots(s, 1);
    const Spectrum spectrum = diagonalize(h);
    std::vector<detail::ShotCircuit> circuits;
    circuits.reserve(keep.size());
    for (std::size_t i : keep) {
        const HadamardSpec spec{rho, exp_i_hermitian(spectrum, times[i]), std::nullopt, phi};
        circuits.emplace_back(spec, ShadowScheme::GlobalClifford);
    }
    return detail::run_shots(s, [&](std::size_t i, PhiloxStream &rng) {
        const std::size_t slot = i % keep.size();
        Snapshot snap = circuits[slot].run(rng);
        snap.phi = phi;
        snap.term_index = keep[slot];
        return snap;
    });
}

/// Per time, the signed median-of-means estimate of ⟨λ|ρ(Z)|λ⟩ divided by
/// cos(E t + φ); times are combined by inverse-variance weights.
/// `k_batches` = 0 applies the default batch rule per time.
inline EstimateReport finalize_fidelity(std::span<const Snapshot> records, const StateVector &lambda, double energy,
                                        std::span<const double> times, double phi, std::size_t k_batches = 0) {
    const StateVector v = lambda / lambda.norm();
    const ObservableEvaluator eval{Observable(ComplexMatrix(v * v.adjoint()))};
    std::vector<std::vector<double>> per_time(times.size());
    for (const auto &r : records) {
        if (r.term_index >= times.size()) {
            throw UsageError("fidelity record refers to a missing time");
        }
        per_time[r.term_index].push_back(static_cast<double>(r.aux_sign) * eval.value(r));
    }
    EstimateReport rep;
    rep.shots_used = records.size();
    rep.scheme = ShadowScheme::GlobalClifford;
    std::vector<double> est, se;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (per_time[i].empty()) {
            continue;
        }
        const double c = std::cos(energy * times[i] + phi);
        if (std::abs(c) < kCosineCutoff) {
            throw UsageError("fidelity record at an uninformative time");
        }
        const std::size_t k = k_batches == 0 ? batches_for(per_time[i].size()) : k_batches;
        const RobustEstimate m = median_of_means(per_time[i], k);
        est.push_back(m.value / c);
        se.push_back(m.std_error / std::abs(c));
        rep.breakdown.emplace_back(detail::time_label("F", times[i]), est.back());
        rep.breakdown.emplace_back(detail::time_label("std_error", times[i]), se.back());
    }
    if (est.empty()) {
        throw UsageError("no fidelity records");
    }
    const bool weighted = std::all_of(se.begin(), se.end(), [](double x) { return x > 0.0; });
    std::vector<double> w(est.size()), wx(est.size());
    for (std::size_t i = 0; i < est.size(); ++i) {
        w[i] = weighted ? 1.0 / (se[i] * se[i]) : 1.0;
        wx[i] = w[i] * est[i];
    }
    const double wsum = pairwise_sum(w);
    rep.value = Complex(pairwise_sum(wx) / wsum, 0.0);
    if (weighted) {
        rep.std_error = 1.0 / std::sqrt(wsum);
    } else {
        std::vector<double> sq(se.size());
        for (std::size_t i = 0; i < se.size(); ++i) {
            sq[i] = se[i] * se[i];
        }
        rep.std_error = std::sqrt(pairwise_sum(sq)) / static_cast<double>(se.size());
    }
    return rep;
}

inline EstimateReport estimate_fidelity(const DensityOperator &rho, const PauliSum &h, const StateVector &lambda,
                                        double energy, std::span<const double> times, double phi, const Sampling &s,
                                        std::size_t k_batches = 0) {
    return finalize_fidelity(collect_fidelity(rho, h, lambda, energy, times, phi, s), lambda, energy, times, phi, k_batches);
}

// ---------------------------------------------------------------------------
// Energy through ρ(I)

namespace detail {

/// One Z-basis circuit per unitary with local snapshots of both conditional
/// states; each shot picks a unitary uniformly and discards the aux sign.
inline std::vector<Snapshot> collect_traced_out(const DensityOperator &rho, const std::vector<ComplexMatrix> &unitaries,
                                                const Sampling &s) {
    if (unitaries.empty()) {
        throw UsageError("no evolution times given");
    }
    std::vector<ShotCircuit> circuits;
    circuits.reserve(unitaries.size());
    for (const auto &u : unitaries) {
        circuits.emplace_back(HadamardSpec{rho, u, std::nullopt, 0.0}, ShadowScheme::LocalPauli);
    }
    return run_shots(s, [&](std::size_t, PhiloxStream &rng) {
        const auto k = static_cast<std::size_t>(uniform_index(rng, circuits.size()));
        Snapshot snap = circuits[k].run(rng);
        snap.aux_sign = 0;
        snap.term_index = k;
        return snap;
    });
}

inline std::vector<ComplexMatrix> evolutions(const PauliSum &h, std::span<const double> times) {
    if (times.empty()) {
        throw UsageError("no evolution times given");
    }
    const Spectrum spectrum = diagonalize(h);
    std::vector<ComplexMatrix> out;
    for (double t : times) {
        out.push_back(exp_i_hermitian(spectrum, t));
    }
    return out;
}

}  // namespace detail

inline std::vector<Snapshot> collect_energy(const DensityOperator &rho, const PauliSum &h, std::span<const double> times,
                                            const Sampling &s) {
    detail::require_shots(s, 1);
    if (h.qubits() != rho.qubits()) {
        throw ContractViolation("Hamiltonian and state act on different qubit counts");
    }
    return detail::collect_traced_out(rho, detail::evolutions(h, times), s);
}

/// Term-by-term median-of-means estimates of tr(P_k ρ(I)) summed with the
/// Hamiltonian coefficients.
inline EstimateReport finalize_energy(std::span<const Snapshot> records, const PauliSum &h, std::size_t k_batches = 0) {
    if (records.empty()) {
        throw UsageError("no energy records");
    }
    if (h.empty()) {
        throw UsageError("empty Hamiltonian");
    }
    const ObservableEvaluator eval{Observable(h)};
    const std::size_t k = k_batches == 0 ? batches_for(records.size(), h.terms().size()) : k_batches;
    EstimateReport rep;
    rep.shots_used = records.size();
    rep.scheme = ShadowScheme::LocalPauli;
    std::vector<double> totals(records.size(), 0.0);
    std::vector<double> contributions;
    for (std::size_t t = 0; t < h.terms().size(); ++t) {
        std::vector<double> values(records.size());
        const double c = h.terms()[t].coefficient();
        for (std::size_t j = 0; j < records.size(); ++j) {
            values[j] = eval.term_value(t, records[j]);
            totals[j] += c * values[j];
        }
        const double contribution = c * median_of_means(values, k).value;
        contributions.push_back(contribution);
        rep.breakdown.emplace_back(h.terms()[t].letters(), contribution);
    }
    rep.value = Complex(pairwise_sum(contributions), 0.0);
    rep.std_error = median_of_means(totals, k).std_error;
    return rep;
}

inline EstimateReport estimate_energy_via_rho_i(const DensityOperator &rho, const PauliSum &h, std::span<const double> times,
                                                const Sampling &s, std::size_t k_batches = 0) {
    return finalize_energy(collect_energy(rho, h, times, s), h, k_batches);
}

// ---------------------------------------------------------------------------
// Purity of ρ(I)

inline std::vector<Snapshot> collect_purity(const DensityOperator &rho, const std::vector<ComplexMatrix> &unitaries,
                                            const Sampling &s) {
    detail::require_shots(s, 2);
    for (const auto &u : unitaries) {
        if (u.rows() != rho.matrix().rows()) {
            throw ContractViolation("unitary and state act on different qubit counts");
        }
    }
    return detail::collect_traced_out(rho, unitaries, s);
}

/// U-statistic over all snapshot pairs; the error comes from the spread of
/// the same statistic over contiguous batches.
inline EstimateReport finalize_purity(std::span<const Snapshot> records, std::size_t k_batches = 0) {
    if (records.size() < 2) {
        throw UsageError("purity needs at least two snapshots");
    }
    EstimateReport rep;
    rep.value = Complex(local_purity_u_statistic(records), 0.0);
    rep.shots_used = records.size();
    rep.scheme = ShadowScheme::LocalPauli;
    std::size_t k = k_batches == 0 ? batches_for(records.size()) : k_batches;
    k = std::min(k, records.size() / 2);
    if (k >= 2) {
        std::vector<double> batch(k);
        for (std::size_t b = 0; b < k; ++b) {
            const auto [begin, end] = batch_range(records.size(), k, b);
            batch[b] = local_purity_u_statistic(records.subspan(begin, end - begin));
        }
        rep.std_error = sample_sd(batch) / std::sqrt(static_cast<double>(k));
    }
    rep.breakdown = {{"batches", static_cast<double>(k)}};
    return rep;
}

inline EstimateReport estimate_purity_rho_i(const DensityOperator &rho, const std::vector<ComplexMatrix> &unitaries,
                                            const Sampling &s, std::size_t k_batches = 0) {
    return finalize_purity(collect_purity(rho, unitaries, s), k_batches);
}

// ---------------------------------------------------------------------------
// Anti-controlled eigenstateness scan

struct ScanPoint {
    double t1 = 0.0;
    double t2 = 0.0;
    double delta_t = 0.0;
    double value = 0.0;
    double std_error = 0.0;
    std::size_t shots = 0;
};

struct CosineFit {
    double residual = 0.0;
    double energy = 0.0;
};

struct ScanReport {
    std::vector<ScanPoint> points;
    CosineFit fit;
    double residual_std_error = 0.0;  // RMS of the per-point standard errors
    std::size_t shots_used = 0;
};

/// min over E in [e_min, e_max] of the RMS deviation of values from
/// cos(E Δt): a 512-point grid followed by golden-section refinement
/// around the best grid point.
inline CosineFit fit_cosine(std::span<const double> delta_t, std::span<const double> values, double e_min, double e_max) {
    if (delta_t.empty() || delta_t.size() != values.size()) {
        throw UsageError("cosine fit needs matching, nonempty inputs");
    }
    auto rms = [&](double e) {
        std::vector<double> sq(values.size());
        for (std::size_t j = 0; j < values.size(); ++j) {
            const double d = values[j] - std::cos(e * delta_t[j]);
            sq[j] = d * d;
        }
        return std::sqrt(pairwise_sum(sq) / static_cast<double>(sq.size()));
    };
    constexpr int kGrid = 512;
    const double step = kGrid > 1 && e_max > e_min ? (e_max - e_min) / (kGrid - 1) : 0.0;
    CosineFit best{rms(e_min), e_min};
    int best_k = 0;
    for (int k = 1; k < kGrid; ++k) {
        const double e = e_min + step * k;
        const double r = rms(e);
        if (r < best.residual) {
            best = {r, e};
            best_k = k;
        }
    }
    if (step > 0.0) {
        double lo = e_min + step * std::max(0, best_k - 1);
        double hi = e_min + step * std::min(kGrid - 1, best_k + 1);
        const double g = (std::sqrt(5.0) - 1.0) / 2.0;
        double a = hi - g * (hi - lo), b = lo + g * (hi - lo);
        double fa = rms(a), fb = rms(b);
        for (int it = 0; it < 60; ++it) {
            if (fa < fb) {
                hi = b;
                b = a;
                fb = fa;
                a = hi - g * (hi - lo);
                fa = rms(a);
            } else {
                lo = a;
                a = b;
                fa = fb;
                b = lo + g * (hi - lo);
                fb = rms(b);
            }
        }
        for (const auto &[r, e] : {std::pair{fa, a}, std::pair{fb, b}}) {
            if (r < best.residual) {
                best = {r, e};
            }
        }
    }
    return best;
}

/// Shot i runs pair i mod P with U = e^{iHt1}, W = e^{iHt2}, φ = 0.
inline std::vector<Snapshot> collect_scan(const DensityOperator &rho, const PauliSum &h,
                                          std::span<const std::pair<double, double>> pairs, const Sampling &s) {
    if (pairs.empty()) {
        throw UsageError("no time pairs given");
    }
    detail::require_shots(s, pairs.size());
    const Spectrum spectrum = diagonalize(h);
    std::vector<AuxSampler> aux;
    aux.reserve(pairs.size());
    for (const auto &[t1, t2] : pairs) {
        aux.emplace_back(HadamardSpec{rho, exp_i_hermitian(spectrum, t1), exp_i_hermitian(spectrum, t2), 0.0}, AuxBasis::Z);
    }
    return detail::run_shots(s, [&](std::size_t i, PhiloxStream &rng) {
        Snapshot snap;
        snap.term_index = i % pairs.size();
        snap.aux_sign = aux[snap.term_index].sample_sign(rng);
        return snap;
    });
}

inline ScanReport finalize_scan(std::span<const Snapshot> records, std::span<const std::pair<double, double>> pairs,
                                double e_min, double e_max) {
    std::vector<std::vector<double>> signs(pairs.size());
    for (const auto &r : records) {
        if (r.term_index >= pairs.size()) {
            throw UsageError("scan record refers to a missing time pair");
        }
        signs[r.term_index].push_back(r.aux_sign);
    }
    ScanReport rep;
    rep.shots_used = records.size();
    std::vector<double> dts, values, se_sq;
    for (std::size_t j = 0; j < pairs.size(); ++j) {
        if (signs[j].empty()) {
            throw UsageError("time pair without records");
        }
        const auto [m, se] = detail::sign_mean(signs[j]);
        rep.points.push_back({pairs[j].first, pairs[j].second, pairs[j].first - pairs[j].second, m, se, signs[j].size()});
        dts.push_back(pairs[j].first - pairs[j].second);
        values.push_back(m);
        se_sq.push_back(se * se);
    }
    rep.fit = fit_cosine(dts, values, e_min, e_max);
    rep.residual_std_error = std::sqrt(pairwise_sum(se_sq) / static_cast<double>(se_sq.size()));
    return rep;
}

/// Extremal eigenvalues of H, the energy range searched by the fit.
inline std::pair<double, double> spectral_range(const PauliSum &h) {
    const Spectrum s = diagonalize(h);
    return {s.eigenvalues.minCoeff(), s.eigenvalues.maxCoeff()};
}

inline ScanReport eigenstateness_scan(const DensityOperator &rho, const PauliSum &h,
                                      std::span<const std::pair<double, double>> pairs, const Sampling &s) {
    const auto [lo, hi] = spectral_range(h);
    return finalize_scan(collect_scan(rho, h, pairs, s), pairs, lo, hi);
}

}  // namespace hshadow
