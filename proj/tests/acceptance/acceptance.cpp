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

// Acceptance suite: one PASS/FAIL line per criterion. Pass criterion
// numbers as arguments to run a subset.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hshadow/hshadow.hpp"
#include "support/enumeration.hpp"
#include "support/oracles.hpp"

namespace {

using namespace hshadow;
namespace fs = std::filesystem;

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(const char *spec, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

double max_abs(const ComplexMatrix &m) {
    return m.cwiseAbs().maxCoeff();
}

const Pauli kPaulis[] = {Pauli::I, Pauli::X, Pauli::Y, Pauli::Z};

/// Random circuit of the requested family on n = 1 + (trial mod 3) qubits.
struct RandomCase {
    HadamardSpec spec;
    ComplexMatrix o;
};

RandomCase random_case(std::mt19937_64 &mt, int trial, bool with_w) {
    const std::size_t n = 1 + static_cast<std::size_t>(trial % 3);
    const Eigen::Index rank = 1 + static_cast<Eigen::Index>(mt() % (std::uint64_t{1} << n));
    std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
    RandomCase c{HadamardSpec{DensityOperator::state(testing::random_density(n, mt, rank)), testing::random_unitary(n, mt),
                              std::nullopt, angle(mt)},
                 testing::random_hermitian(n, mt)};
    if (with_w) {
        c.spec.w = testing::random_unitary(n, mt);
    }
    return c;
}

/// Every table row through three independent routes: the simulated circuit
/// output, the oracle closed forms, and the row formula evaluated directly
/// on the raw matrices. Returns the largest disagreement.
double table_deviation(const RandomCase &c) {
    const HadamardSpec &s = c.spec;
    const ComplexMatrix &rho = s.rho.matrix();
    const ComplexMatrix w = s.w_or_identity();
    const ComplexMatrix id = identity(s.qubits());
    const Complex phase = std::polar(1.0, s.phi);
    const ComplexMatrix out = output_state(s).matrix();
    const ComplexMatrix gates = testing::circuit_output(rho, s.u, w, s.phi);
    double dev = max_abs(out - gates);
    for (const ComplexMatrix *o : {&id, &c.o}) {
        const Complex z = phase * (w.adjoint() * *o * s.u * rho).trace();
        const Complex direct[] = {0.5 * (*o * (w * rho * w.adjoint() + s.u * rho * s.u.adjoint())).trace(),
                                  0.5 * (*o * (w * rho * w.adjoint() - s.u * rho * s.u.adjoint())).trace(), z.imag(),
                                  z.real()};
        const std::optional<Observable> obs = o == &id ? std::nullopt : std::optional<Observable>(*o);
        for (int k = 0; k < 4; ++k) {
            const Complex circuit = (kron(aux_readout(kPaulis[k]), *o) * out).trace();
            const Complex oracle_value = oracle::exact_table_entry(s, kPaulis[k], obs);
            const Complex closed = (*o * oracle::exact_post_measurement(s, kPaulis[k])).trace();
            dev = std::max({dev, std::abs(circuit - oracle_value), std::abs(circuit - direct[k]), std::abs(circuit - closed)});
        }
    }
    for (Pauli p : kPaulis) {
        dev = std::max(dev, max_abs(post_measurement(s, p).matrix() - oracle::exact_post_measurement(s, p)));
    }
    // Row identities without an observable.
    dev = std::max(dev, std::abs(post_measurement(s, Pauli::I).trace() - 1.0));
    if (!s.w) {
        dev = std::max(dev, std::abs(post_measurement(s, Pauli::X).trace()));
    }
    return dev;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Outcome standard_table() {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 mt(1001);
    double dev = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        dev = std::max(dev, table_deviation(random_case(mt, trial, false)));
    }
    const double elapsed = seconds_since(t0);
    return {dev <= 1e-9 && elapsed < 30.0,
            "200 specs, max deviation " + fmt("%.2e", dev) + " (tol 1e-9), " + fmt("%.2f", elapsed) + " s (limit 30 s)"};
}

Outcome extended_table() {
    std::mt19937_64 mt(1002);
    double dev = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        dev = std::max(dev, table_deviation(random_case(mt, trial, true)));
    }
    // W = I must reproduce the standard test entry for entry.
    std::mt19937_64 regression(1001);
    double reg = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const RandomCase c = random_case(regression, trial, false);
        HadamardSpec with_identity = c.spec;
        with_identity.w = identity(c.spec.qubits());
        for (Pauli p : kPaulis) {
            reg = std::max(reg, max_abs(post_measurement(c.spec, p).matrix() - post_measurement(with_identity, p).matrix()));
            reg = std::max(reg, max_abs(oracle::exact_post_measurement(c.spec, p) -
                                        oracle::exact_post_measurement(with_identity, p)));
            const Observable o(c.o);
            reg = std::max(reg, std::abs(oracle::exact_table_entry(c.spec, p, o) - oracle::exact_table_entry(with_identity, p, o)));
        }
    }
    return {dev <= 1e-9 && reg <= 1e-12, "200 specs, max deviation " + fmt("%.2e", dev) +
                                             " (tol 1e-9); W = I regression " + fmt("%.2e", reg) + " (tol 1e-12)"};
}

Outcome circuit_chain() {
    std::mt19937_64 mt(1003);
    double dev = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const RandomCase c = random_case(mt, trial, trial % 2 == 1);
        const auto chain = oracle::appendix_chain(c.spec);
        dev = std::max({dev, max_abs(chain.out - oracle::one_shot_output(c.spec)),
                        max_abs(chain.out - output_state(c.spec).matrix())});
    }
    return {dev <= 1e-12, "50 specs, max deviation " + fmt("%.2e", dev) + " (tol 1e-12)"};
}

Outcome shadow_enumeration() {
    std::mt19937_64 mt(1004);
    double channel = 0.0, signed_dev = 0.0;
    for (ShadowScheme scheme : {ShadowScheme::LocalPauli, ShadowScheme::GlobalClifford}) {
        for (std::size_t n : {1U, 2U}) {
            const auto rho = DensityOperator::state(testing::random_density(n, mt));
            ComplexMatrix acc = ComplexMatrix::Zero(rho.matrix().rows(), rho.matrix().cols());
            testing::for_each_snapshot(rho, scheme, [&](double p, const Snapshot &s) { acc += p * reconstruct(s).matrix(); });
            channel = std::max(channel, max_abs(acc - rho.matrix()));

            const RandomCase c = random_case(mt, static_cast<int>(n) - 1, n == 2);
            const AuxSampler aux(c.spec, AuxBasis::Z);
            const ObservableEvaluator eval{Observable(c.o)};
            double expected = 0.0;
            for (int sign : {1, -1}) {
                if (aux.probability(sign) == 0.0) {
                    continue;
                }
                testing::for_each_snapshot(aux.conditional_state(sign), scheme, [&](double p, const Snapshot &s) {
                    expected += aux.probability(sign) * p * sign * eval.value(s);
                });
            }
            const double exact = (c.o * oracle::exact_post_measurement(c.spec, Pauli::Z)).trace().real();
            signed_dev = std::max(signed_dev, std::abs(expected - exact));
        }
    }
    return {channel <= 1e-10 && signed_dev <= 1e-10, "n = 1, 2, both schemes: channel " + fmt("%.2e", channel) +
                                                         ", signed " + fmt("%.2e", signed_dev) + " (tol 1e-10)"};
}

/// Fixed 3-qubit TFIM workloads shared by the sampled criteria.
struct Presets {
    std::shared_ptr<const PauliSum> h = std::make_shared<const PauliSum>(tfim(3));
    Spectrum spectrum = diagonalize(*h);
    DensityOperator random_pure;
    DensityOperator random_mixed;
    DensityOperator superposition;
    ComplexMatrix evolution;
    LcuEnsemble filter;
    PauliSum observable{3};
    std::vector<double> times{0.4, 0.9, 1.3};

    Presets() : random_pure(make_pure()), random_mixed(make_mixed()), superposition(make_superposition()),
                evolution(mat_exp_iht(*h, 0.7)), filter(make_filter()) {
        observable.add(1.0, "ZII").add(0.5, "XXI");
    }

    StateVector target() const {
        return spectrum.eigenvector(0);
    }
    double target_energy() const {
        return spectrum.eigenvalues(0);
    }

   private:
    static DensityOperator make_pure() {
        std::mt19937_64 mt(501);
        return DensityOperator::pure(testing::random_pure(3, mt));
    }
    static DensityOperator make_mixed() {
        std::mt19937_64 mt(502);
        return DensityOperator::state(testing::random_density(3, mt, 2));
    }
    DensityOperator make_superposition() const {
        const StateVector psi = std::sqrt(0.7) * spectrum.eigenvector(0) + std::sqrt(0.3) * spectrum.eigenvector(3);
        return DensityOperator::pure(psi / psi.norm());
    }
    LcuEnsemble make_filter() const {
        FilterDescriptor d;
        d.hamiltonian = h;
        d.order = 21;
        d.width = 0.15;
        return build_fourier_filter(d);
    }
};

const Presets &presets() {
    static const Presets p;
    return p;
}

Outcome sampled_accuracy() {
    const auto t0 = std::chrono::steady_clock::now();
    const Presets &p = presets();
    const int reps = 200;
    const std::size_t shots = 20000;
    struct Task {
        std::string name;
        Complex exact;
        std::function<EstimateReport(const Sampling &)> run;
        int covered = 0;
    };
    std::vector<Task> tasks;
    tasks.push_back({"trace_u", oracle::exact_trace_u(p.random_pure, p.evolution),
                     [&](const Sampling &s) { return estimate_trace_u(p.random_pure, p.evolution, s); }});
    tasks.push_back({"lcu", oracle::exact_lcu(p.random_mixed, p.filter, Observable(p.observable)), [&](const Sampling &s) {
                         return estimate_lcu(p.random_mixed, p.filter, Observable(p.observable), ShadowScheme::LocalPauli, s);
                     }});
    tasks.push_back({"energy", oracle::exact_energy(p.random_pure, *p.h),
                     [&](const Sampling &s) { return estimate_energy_via_rho_i(p.random_pure, *p.h, p.times, s); }});
    tasks.push_back({"fidelity", oracle::exact_fidelity(p.superposition, p.target()), [&](const Sampling &s) {
                         return estimate_fidelity(p.superposition, *p.h, p.target(), p.target_energy(), p.times, 0.0, s);
                     }});
    bool pass = true;
    std::string detail;
    for (auto &t : tasks) {
        for (int r = 0; r < reps; ++r) {
            const EstimateReport rep = t.run(Sampling{shots, 5000 + static_cast<std::uint64_t>(r), 1});
            t.covered += std::abs(rep.value - t.exact) <= 4 * rep.std_error ? 1 : 0;
        }
        const double coverage = static_cast<double>(t.covered) / reps;
        pass = pass && coverage >= 0.99;
        detail += t.name + " " + fmt("%.3f", coverage) + ", ";
    }
    const double elapsed = seconds_since(t0);
    pass = pass && elapsed < 300.0;
    return {pass, "coverage at 4 std_error over 200 runs of 2e4 shots: " + detail + "(need 0.99), " + fmt("%.1f", elapsed) +
                      " s on 1 thread (limit 300 s)"};
}

Outcome fidelity_vignette() {
    const Presets &p = presets();
    const EstimateReport r =
        estimate_fidelity(p.superposition, *p.h, p.target(), p.target_energy(), p.times, 0.0, Sampling{50000, 77, 0});
    const double err = std::abs(r.value.real() - 0.7);
    const double tol = std::max(0.05, 3 * r.std_error);
    return {err <= tol, "estimate " + fmt("%.4f", r.value.real()) + " +/- " + fmt("%.4f", r.std_error) + " vs 0.7, |error| " +
                            fmt("%.4f", err) + " (tol " + fmt("%.4f", tol) + ")"};
}

Outcome energy_time_invariance() {
    const Presets &p = presets();
    const std::vector<std::vector<double>> lists{{0.2, 0.5, 0.9}, {1.3, 1.7, 2.4}, {3.1, 4.2, 5.5}};
    double oracle_spread = 0.0;
    const double reference = oracle::exact_energy_estimator(p.random_mixed, *p.h, lists[0]);
    std::vector<EstimateReport> sampled;
    for (std::size_t k = 0; k < lists.size(); ++k) {
        oracle_spread = std::max(oracle_spread, std::abs(oracle::exact_energy_estimator(p.random_mixed, *p.h, lists[k]) - reference));
        sampled.push_back(estimate_energy_via_rho_i(p.random_mixed, *p.h, lists[k], Sampling{20000, 700 + k, 0}));
    }
    bool agree = true;
    double worst = 0.0;
    for (std::size_t a = 0; a < sampled.size(); ++a) {
        for (std::size_t b = a + 1; b < sampled.size(); ++b) {
            const double combined = std::hypot(sampled[a].std_error, sampled[b].std_error);
            const double ratio = std::abs(sampled[a].value - sampled[b].value) / combined;
            worst = std::max(worst, ratio);
            agree = agree && ratio <= 3.0;
        }
    }
    return {oracle_spread <= 1e-10 && agree, "oracle spread " + fmt("%.2e", oracle_spread) +
                                                 " (tol 1e-10); worst pairwise gap " + fmt("%.2f", worst) +
                                                 " combined std_error (tol 3)"};
}

Outcome purity() {
    const PauliSum h = tfim(2);
    const Spectrum s = diagonalize(h);
    const DensityOperator eigen = DensityOperator::pure(s.eigenvector(1));
    const double gap = s.eigenvalues(1) - s.eigenvalues(0);
    const double t = std::numbers::pi / gap;
    const StateVector sup = (s.eigenvector(0) + s.eigenvector(1)) / std::sqrt(2.0);
    const DensityOperator superposed = DensityOperator::pure(sup / sup.norm());
    const ComplexMatrix u = mat_exp_iht(h, t);
    const double exact_eigen = oracle::exact_purity(HadamardSpec{eigen, u, std::nullopt, 0.0});
    const double exact_sup = oracle::exact_purity(HadamardSpec{superposed, u, std::nullopt, 0.0});
    const std::vector<ComplexMatrix> us{u};
    const double est_eigen = estimate_purity_rho_i(eigen, us, Sampling{10000, 81, 0}).value.real();
    const double est_sup = estimate_purity_rho_i(superposed, us, Sampling{10000, 82, 0}).value.real();
    const bool pass = std::abs(exact_eigen - 1.0) <= 1e-12 && exact_sup < 0.9 && std::cos(gap * t) <= 0 &&
                      std::abs(est_eigen - exact_eigen) <= 0.05 && std::abs(est_sup - exact_sup) <= 0.05;
    return {pass, "oracle eigenstate " + fmt("%.12f", exact_eigen) + ", superposition " + fmt("%.4f", exact_sup) +
                      " (need < 0.9); sampled " + fmt("%.4f", est_eigen) + " and " + fmt("%.4f", est_sup) + " (tol 0.05)"};
}

Outcome eigenstate_scan() {
    const PauliSum h = tfim(2);
    const Spectrum s = diagonalize(h);
    auto grid = [](int count) {
        std::vector<std::pair<double, double>> pairs;
        for (int k = 0; k < count; ++k) {
            pairs.emplace_back(0.25 * k, 0.0);
        }
        return pairs;
    };
    const auto short_grid = grid(12);
    const double e = s.eigenvalues(1);
    const ScanReport eig = eigenstateness_scan(DensityOperator::pure(s.eigenvector(1)), h, short_grid, Sampling{24000, 91, 0});
    double worst_eig = 0.0;
    for (const auto &pt : eig.points) {
        const double gap = std::abs(pt.value - std::cos(e * pt.delta_t));
        worst_eig = std::max(worst_eig, pt.std_error > 0 ? gap / pt.std_error : (gap > 1e-12 ? INFINITY : 0.0));
    }
    const auto long_grid = grid(24);
    const StateVector sup = (s.eigenvector(0) + s.eigenvector(1)) / std::sqrt(2.0);
    const ScanReport mix = eigenstateness_scan(DensityOperator::pure(sup), h, long_grid, Sampling{48000, 92, 0});
    double worst_mix = 0.0;
    for (const auto &pt : mix.points) {
        const double model = 0.5 * std::cos(s.eigenvalues(0) * pt.delta_t) + 0.5 * std::cos(s.eigenvalues(1) * pt.delta_t);
        const double gap = std::abs(pt.value - model);
        worst_mix = std::max(worst_mix, pt.std_error > 0 ? gap / pt.std_error : (gap > 1e-12 ? INFINITY : 0.0));
    }
    const bool pass = worst_eig <= 3 && eig.fit.residual < 2 * eig.residual_std_error && worst_mix <= 3 && mix.fit.residual > 0.1;
    return {pass, "eigenstate: worst point " + fmt("%.2f", worst_eig) + " std_error, residual " + fmt("%.4f", eig.fit.residual) +
                      " vs 2 x " + fmt("%.4f", eig.residual_std_error) + "; superposition: worst point " +
                      fmt("%.2f", worst_mix) + " std_error, residual " + fmt("%.3f", mix.fit.residual) + " (need > 0.1)"};
}

Outcome budget_formula() {
    bool closed = true;
    for (double eps : {0.05, 0.1, 0.3}) {
        for (double delta : {0.01, 0.05}) {
            for (std::size_t m : {1U, 10U}) {
                for (double norm : {1.0, 3.0, 9.0}) {
                    const auto expected = static_cast<std::size_t>(std::ceil(34.0 * norm * std::log(2.0 * m / delta) / (eps * eps)));
                    closed = closed && budget({eps, delta, m, norm, 34.0}) == std::max<std::size_t>(expected, 1);
                }
            }
        }
    }
    const std::size_t spot = budget({0.1, 0.01, 10, 3.0, 34.0});
    const Presets &p = presets();
    const StateVector lambda = p.target();
    const double norm = shadow_norm_sq(Observable(ComplexMatrix(lambda * lambda.adjoint())), ShadowScheme::GlobalClifford);
    const std::size_t n = budget({0.1, 0.05, 1, norm, 34.0});
    const double exact = oracle::exact_fidelity(p.superposition, lambda);
    int within = 0;
    for (int r = 0; r < 100; ++r) {
        const EstimateReport rep = estimate_fidelity(p.superposition, *p.h, lambda, p.target_energy(), p.times, 0.0,
                                                     Sampling{n, 9000 + static_cast<std::uint64_t>(r), 0});
        within += std::abs(rep.value.real() - exact) <= 0.1 ? 1 : 0;
    }
    return {closed && within >= 95, std::string("closed form ") + (closed ? "exact" : "MISMATCH") + ", spot value " +
                                        std::to_string(spot) + "; N = " + std::to_string(n) + " gives |error| <= 0.1 in " +
                                        std::to_string(within) + "/100 trials (need 95)"};
}

std::string read_file(const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

int run_cli(const std::string &args) {
    const std::string cmd = std::string(HSHADOW_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome determinism() {
    const fs::path dir = fs::temp_directory_path() / "hshadow_acceptance_determinism";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const std::vector<std::pair<std::string, std::string>> configs{
        {"trace_u", "type = trace_u\nshots = 4000\n[system]\nqubits = 3\nstate = random_pure\n[hadamard]\nunitary = evolution 0.7\n"},
        {"lcu", "type = lcu\nshots = 4000\nscheme = global\n[system]\nqubits = 3\nstate = random_mixed 2\n[lcu]\nfilter = step\n"
                "observable_term = 1 ZII\n"},
        {"fidelity", "type = fidelity\nshots = 4000\n[system]\nqubits = 3\nstate = superposition 0 3 0.7\n[schedule]\n"
                     "times = 0.4 0.9 1.3\ntarget = 0\n"},
        {"energy", "type = energy\nshots = 4000\n[system]\nqubits = 3\nstate = random_pure\n[schedule]\ntimes = 0.3 0.7 1.1\n"},
        {"purity", "type = purity\nshots = 4000\n[system]\nqubits = 2\nstate = superposition 0 1 0.5\n[schedule]\ntimes = 1.2 2.5\n"},
        {"eigenstateness", "type = eigenstateness\nshots = 4000\n[system]\nqubits = 2\nstate = eigenstate 1\n[schedule]\n"
                           "dt_grid = 0.25 10\n"},
    };
    bool threads_ok = true, replay_ok = true;
    std::string failures;
    for (const auto &[name, body] : configs) {
        std::vector<std::string> runs;
        for (const std::string tag : {"t1", "t8", "replay"}) {
            const fs::path out = dir / (name + "_" + tag);
            std::ofstream(dir / (name + "_" + tag + ".ini")) << "[experiment]\nseed = 17\noutput = " << out.string() << "\n" << body;
        }
        const fs::path log = dir / (name + ".log");
        const std::string base = (dir / name).string();
        const int rc1 = run_cli("--config " + base + "_t1.ini --threads 1 --emit-snapshots " + log.string());
        const int rc8 = run_cli("--config " + base + "_t8.ini --threads 8");
        const int rcr = run_cli("--config " + base + "_replay.ini --replay " + log.string());
        if (rc1 != 0 || rc8 != 0 || rcr != 0) {
            threads_ok = false;
            failures += " " + name + "(exit)";
            continue;
        }
        for (const std::string ext : {".tsv", ".txt", ".scan.tsv"}) {
            const std::string a = read_file(base + "_t1" + ext);
            threads_ok = threads_ok && a == read_file(base + "_t8" + ext);
            if (ext != ".txt") {
                replay_ok = replay_ok && a == read_file(base + "_replay" + ext);
            }
        }
        if (read_file(base + "_t1.tsv").empty()) {
            threads_ok = false;
            failures += " " + name + "(empty)";
        }
    }
    fs::remove_all(dir);
    return {threads_ok && replay_ok, std::string("6 experiments: 1 vs 8 threads ") + (threads_ok ? "byte-identical" : "DIFFER") +
                                         ", replay " + (replay_ok ? "bit-exact" : "DIFFERS") + failures};
}

}  // namespace

int main(int argc, char **argv) {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"standard Hadamard-test table identities", standard_table},
        {"extended (anti-controlled W) table identities", extended_table},
        {"four-stage circuit chain equals output state", circuit_chain},
        {"shadow channel unbiasedness by enumeration", shadow_enumeration},
        {"sampled estimator coverage", sampled_accuracy},
        {"fidelity of a 0.7/0.3 superposition", fidelity_vignette},
        {"energy estimator independent of evolution times", energy_time_invariance},
        {"purity and eigenstateness", purity},
        {"anti-controlled eigenstate scan", eigenstate_scan},
        {"shadow sample budget", budget_formula},
        {"determinism across threads and replay", determinism},
    };
    std::vector<bool> selected(criteria.size(), argc == 1);
    for (int a = 1; a < argc; ++a) {
        const int k = std::atoi(argv[a]);
        if (k >= 1 && k <= static_cast<int>(criteria.size())) {
            selected[static_cast<std::size_t>(k - 1)] = true;
        }
    }
    int failed = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        if (!selected[k]) {
            continue;
        }
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o{false, ""};
        try {
            o = criteria[k].second();
        } catch (const std::exception &e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::printf("[%s] %2zu %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].first.c_str(), o.detail.c_str(),
                    seconds_since(t0));
        std::fflush(stdout);
        failed += o.pass ? 0 : 1;
    }
    std::printf("%d of %zu selected criteria failed\n", failed,
                static_cast<std::size_t>(std::count(selected.begin(), selected.end(), true)));
    return failed == 0 ? 0 : 1;
}
