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

#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "hshadow/config.hpp"
#include "hshadow/estimators.hpp"
#include "hshadow/hadamard.hpp"
#include "hshadow/oracle.hpp"
#include "hshadow/shadows.hpp"

namespace hshadow {

inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

/// Process exit status for an error escaping a run.
inline int exit_code_for(const std::exception &e) {
    if (dynamic_cast<const ConfigError *>(&e)) {
        return kExitConfig;
    }
    if (dynamic_cast<const NumericalConsistencyError *>(&e)) {
        return kExitNumerical;
    }
    return kExitFailure;
}

struct RunOptions {
    bool oracle_only = false;
    std::optional<std::string> replay;          // snapshot log to finalize instead of sampling
    std::optional<std::string> emit_snapshots;  // where to write the collected records
};

/// One line of the result table.
struct ResultRow {
    std::string experiment;
    Complex value;
    double std_error = 0.0;
    std::size_t shots = 0;
    std::string scheme;
    Complex oracle;
    double abs_deviation = 0.0;
    std::vector<std::pair<std::string, double>> breakdown;
};

struct ScanRow {
    double delta_t, t1, t2, value, std_error;
    std::size_t shots;
    double oracle;
};

struct RunResult {
    std::vector<ResultRow> rows;
    std::vector<ScanRow> scan;
    std::vector<Snapshot> snapshots;
};

inline constexpr const char *kResultColumns =
    "experiment\tvalue_re\tvalue_im\tstd_error\tshots\tscheme\toracle_re\toracle_im\tabs_deviation\tbreakdown";
inline constexpr const char *kScanColumns = "delta_t\tt1\tt2\tvalue\tstd_error\tshots\toracle_value";

/// Shortest round-trip formatting used in every machine-readable file.
inline std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace detail {

inline ResultRow make_row(const std::string &name, const EstimateReport &r, Complex oracle) {
    return {name, r.value, r.std_error, r.shots_used, to_string(r.scheme), oracle, std::abs(r.value - oracle), r.breakdown};
}

inline ResultRow oracle_row(const std::string &name, ShadowScheme scheme, Complex oracle) {
    return {name, oracle, 0.0, 0, to_string(scheme), oracle, 0.0, {}};
}

inline std::vector<Snapshot> load_replay(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError(path, 0, "cannot open snapshot log");
    }
    return read_snapshot_log(in, path);
}

/// tr((P ⊗ O) ρ_out) from the simulated circuit output, O = I when absent.
inline Complex circuit_table_entry(const HadamardSpec &spec, Pauli p, const std::optional<Observable> &o) {
    const ComplexMatrix out = output_state(spec).matrix();
    const ComplexMatrix om = o ? dense(*o) : identity(spec.qubits());
    return (kron(aux_readout(p), om) * out).trace();
}

inline void append_tables(RunResult &res, const std::string &label, const HadamardSpec &spec, const Observable &o) {
    for (bool with_o : {false, true}) {
        for (Pauli p : {Pauli::I, Pauli::X, Pauli::Y, Pauli::Z}) {
            const std::optional<Observable> obs = with_o ? std::optional<Observable>(o) : std::nullopt;
            const Complex value = circuit_table_entry(spec, p, obs);
            const Complex exact = oracle::exact_table_entry(spec, p, obs);
            std::string name = "appendix_tables/" + label + "/" + to_char(p) + (with_o ? "+O" : "");
            res.rows.push_back({std::move(name), value, 0.0, 0, to_string(ShadowScheme::None), exact, std::abs(value - exact), {}});
        }
    }
}

}  // namespace detail

/// Runs one configured experiment. Sampling is skipped in oracle-only mode
/// and replaced by the logged records when replaying.
inline RunResult run_experiment(const ExperimentConfig &c, const RunOptions &opt = {}) {
    RunResult res;
    const DensityOperator &rho = *c.state;
    const PauliSum &h = *c.hamiltonian;
    const std::string name = to_string(c.experiment);
    auto records = [&](auto collect) {
        res.snapshots = opt.replay ? detail::load_replay(*opt.replay) : collect();
        return std::span<const Snapshot>(res.snapshots);
    };
    switch (c.experiment) {
        case Experiment::TraceU: {
            const Complex exact = oracle::exact_trace_u(rho, c.unitary);
            if (opt.oracle_only) {
                res.rows.push_back(detail::oracle_row(name, c.scheme, exact));
                break;
            }
            const auto rec = records([&] { return collect_trace_u(rho, c.unitary, c.sampling()); });
            res.rows.push_back(detail::make_row(name, finalize_trace_u(rec), exact));
            break;
        }
        case Experiment::Lcu: {
            const std::optional<Observable> o = c.observable ? std::optional<Observable>(*c.observable) : std::nullopt;
            const Complex exact = oracle::exact_lcu(rho, *c.lcu, o);
            if (opt.oracle_only) {
                res.rows.push_back(detail::oracle_row(name, c.scheme, exact));
                break;
            }
            const auto rec = records([&] { return collect_lcu(rho, *c.lcu, o.has_value(), c.scheme, c.sampling()); });
            res.rows.push_back(detail::make_row(name, finalize_lcu(rec, *c.lcu, o), exact));
            break;
        }
        case Experiment::Fidelity: {
            const Spectrum s = diagonalize(h);
            const StateVector lambda = s.eigenvector(static_cast<Eigen::Index>(c.target));
            const double energy = s.eigenvalues(static_cast<Eigen::Index>(c.target));
            const Complex exact(oracle::exact_fidelity(rho, lambda), 0.0);
            if (opt.oracle_only) {
                res.rows.push_back(detail::oracle_row(name, c.scheme, exact));
                break;
            }
            const auto rec = records([&] { return collect_fidelity(rho, h, lambda, energy, c.times, c.phi, c.sampling()); });
            res.rows.push_back(detail::make_row(name, finalize_fidelity(rec, lambda, energy, c.times, c.phi, c.batches), exact));
            break;
        }
        case Experiment::Energy: {
            const Complex exact(oracle::exact_energy(rho, h), 0.0);
            if (opt.oracle_only) {
                res.rows.push_back(detail::oracle_row(name, c.scheme, exact));
                break;
            }
            const auto rec = records([&] { return collect_energy(rho, h, c.times, c.sampling()); });
            res.rows.push_back(detail::make_row(name, finalize_energy(rec, h, c.batches), exact));
            break;
        }
        case Experiment::Purity: {
            const auto unitaries = detail::evolutions(h, c.times);
            const Complex exact(oracle::exact_pooled_purity(rho, unitaries), 0.0);
            if (opt.oracle_only) {
                res.rows.push_back(detail::oracle_row(name, c.scheme, exact));
                break;
            }
            const auto rec = records([&] { return collect_purity(rho, unitaries, c.sampling()); });
            res.rows.push_back(detail::make_row(name, finalize_purity(rec, c.batches), exact));
            break;
        }
        case Experiment::Eigenstateness: {
            const auto exact = oracle::exact_scan_values(rho, h, c.time_pairs);
            const auto [lo, hi] = spectral_range(h);
            std::vector<double> dts;
            for (const auto &[t1, t2] : c.time_pairs) {
                dts.push_back(t1 - t2);
            }
            const CosineFit exact_fit = fit_cosine(dts, exact, lo, hi);
            if (opt.oracle_only) {
                for (std::size_t j = 0; j < exact.size(); ++j) {
                    res.scan.push_back({dts[j], c.time_pairs[j].first, c.time_pairs[j].second, exact[j], 0.0, 0, exact[j]});
                }
                ResultRow row = detail::oracle_row(name, c.scheme, exact_fit.residual);
                row.breakdown = {{"fit_energy", exact_fit.energy}, {"points", static_cast<double>(exact.size())}};
                res.rows.push_back(std::move(row));
                break;
            }
            const auto rec = records([&] { return collect_scan(rho, h, c.time_pairs, c.sampling()); });
            const ScanReport scan = finalize_scan(rec, c.time_pairs, lo, hi);
            for (std::size_t j = 0; j < scan.points.size(); ++j) {
                const auto &p = scan.points[j];
                res.scan.push_back({p.delta_t, p.t1, p.t2, p.value, p.std_error, p.shots, exact[j]});
            }
            EstimateReport rep;
            rep.value = scan.fit.residual;
            rep.std_error = scan.residual_std_error;
            rep.shots_used = scan.shots_used;
            rep.breakdown = {{"fit_energy", scan.fit.energy},
                             {"oracle_fit_energy", exact_fit.energy},
                             {"points", static_cast<double>(scan.points.size())}};
            res.rows.push_back(detail::make_row(name, rep, exact_fit.residual));
            break;
        }
        case Experiment::AppendixTables: {
            const Observable o(h);
            detail::append_tables(res, "standard", HadamardSpec{rho, c.unitary, std::nullopt, c.phi}, o);
            if (c.anti_controlled) {
                detail::append_tables(res, "extended", HadamardSpec{rho, c.unitary, c.anti_controlled, c.phi}, o);
            }
            break;
        }
    }
    return res;
}

inline void write_result_tsv(std::ostream &out, const RunResult &r) {
    out << kResultColumns << '\n';
    for (const auto &row : r.rows) {
        std::string breakdown;
        for (const auto &[k, v] : row.breakdown) {
            breakdown += (breakdown.empty() ? "" : ";") + k + "=" + format_number(v);
        }
        out << row.experiment << '\t' << format_number(row.value.real()) << '\t' << format_number(row.value.imag()) << '\t'
            << format_number(row.std_error) << '\t' << row.shots << '\t' << row.scheme << '\t'
            << format_number(row.oracle.real()) << '\t' << format_number(row.oracle.imag()) << '\t'
            << format_number(row.abs_deviation) << '\t' << (breakdown.empty() ? "-" : breakdown) << '\n';
    }
}

inline void write_scan_tsv(std::ostream &out, const RunResult &r) {
    out << kScanColumns << '\n';
    for (const auto &p : r.scan) {
        out << format_number(p.delta_t) << '\t' << format_number(p.t1) << '\t' << format_number(p.t2) << '\t'
            << format_number(p.value) << '\t' << format_number(p.std_error) << '\t' << p.shots << '\t'
            << format_number(p.oracle) << '\n';
    }
}

/// Aligned plain-text summary for reading in a terminal.
inline void write_result_text(std::ostream &out, const ExperimentConfig &c, const RunResult &r) {
    auto fmt = [](const char *spec, double v) {
        char buf[48];
        std::snprintf(buf, sizeof buf, spec, v);
        return std::string(buf);
    };
    auto complex_text = [&](Complex z) {
        return fmt("%.8g", z.real()) + (z.imag() < 0 ? " - " : " + ") + fmt("%.8g", std::abs(z.imag())) + "i";
    };
    out << "experiment: " << to_string(c.experiment) << "\nseed: " << c.seed << "\nshots: " << c.shots << "\n\n";
    char line[512];
    std::snprintf(line, sizeof line, "%-28s %-34s %-12s %-8s %-7s %-34s %s\n", "name", "value", "std_error", "shots",
                  "scheme", "oracle", "abs_deviation");
    out << line;
    for (const auto &row : r.rows) {
        std::snprintf(line, sizeof line, "%-28s %-34s %-12s %-8zu %-7s %-34s %s\n", row.experiment.c_str(),
                      complex_text(row.value).c_str(), fmt("%.4g", row.std_error).c_str(), row.shots, row.scheme.c_str(),
                      complex_text(row.oracle).c_str(), fmt("%.3g", row.abs_deviation).c_str());
        out << line;
    }
}

inline void write_text_file(const std::string &path, const std::string &content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot write '" + path + "'");
    }
    out << content;
}

/// Writes <output>.tsv, <output>.txt and, for scans, <output>.scan.tsv;
/// plus the snapshot log when requested.
inline void write_outputs(const ExperimentConfig &c, const RunResult &r, const RunOptions &opt = {}) {
    std::ostringstream tsv, txt;
    write_result_tsv(tsv, r);
    write_result_text(txt, c, r);
    write_text_file(c.output + ".tsv", tsv.str());
    write_text_file(c.output + ".txt", txt.str());
    if (c.experiment == Experiment::Eigenstateness) {
        std::ostringstream scan;
        write_scan_tsv(scan, r);
        write_text_file(c.output + ".scan.tsv", scan.str());
    }
    if (opt.emit_snapshots) {
        std::ostringstream log;
        write_snapshot_log(log, r.snapshots);
        write_text_file(*opt.emit_snapshots, log.str());
    }
}

}  // namespace hshadow
