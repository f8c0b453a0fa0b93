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
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/QR>

#include "hshadow/errors.hpp"
#include "hshadow/estimators.hpp"
#include "hshadow/qcore.hpp"
#include "hshadow/random.hpp"
#include "hshadow/shadows.hpp"

namespace hshadow {

/// One `key = value` line of a config file.
struct ConfigEntry {
    std::string key;
    std::string value;
    std::size_t line = 0;
};

/// Line-oriented `[section]` / `key = value` document. Text after '#' or
/// ';' is a comment. Keys may repeat; single-valued lookups reject repeats.
class IniDocument {
   public:
    static IniDocument parse(std::istream &in, std::string source) {
        IniDocument doc;
        doc.source_ = std::move(source);
        std::string line;
        std::string section;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (auto c = line.find_first_of("#;"); c != std::string::npos) {
                line.erase(c);
            }
            const std::string text = trim(line);
            if (text.empty()) {
                continue;
            }
            if (text.front() == '[') {
                if (text.back() != ']' || text.size() < 3) {
                    throw ConfigError(doc.source_, line_no, "malformed section header");
                }
                section = trim(text.substr(1, text.size() - 2));
                doc.sections_[section];
                continue;
            }
            const auto eq = text.find('=');
            if (eq == std::string::npos) {
                throw ConfigError(doc.source_, line_no, "expected 'key = value'");
            }
            if (section.empty()) {
                throw ConfigError(doc.source_, line_no, "key outside of any section");
            }
            ConfigEntry e{trim(text.substr(0, eq)), trim(text.substr(eq + 1)), line_no};
            if (e.key.empty()) {
                throw ConfigError(doc.source_, line_no, "empty key");
            }
            doc.sections_[section].push_back(std::move(e));
        }
        return doc;
    }

    const std::string &source() const {
        return source_;
    }

    bool has_section(const std::string &section) const {
        return sections_.count(section) != 0;
    }

    std::vector<ConfigEntry> all(const std::string &section, const std::string &key) const {
        std::vector<ConfigEntry> out;
        if (auto it = sections_.find(section); it != sections_.end()) {
            for (const auto &e : it->second) {
                if (e.key == key) {
                    out.push_back(e);
                }
            }
        }
        return out;
    }

    std::optional<ConfigEntry> get(const std::string &section, const std::string &key) const {
        auto found = all(section, key);
        if (found.empty()) {
            return std::nullopt;
        }
        if (found.size() > 1) {
            throw ConfigError(source_, found[1].line, "duplicate key '" + key + "' in [" + section + "]");
        }
        return found.front();
    }

    ConfigEntry require(const std::string &section, const std::string &key) const {
        auto e = get(section, key);
        if (!e) {
            throw ConfigError(source_, 0, "missing required key '" + key + "' in [" + section + "]");
        }
        return *e;
    }

    /// Rejects sections and keys outside the given schema.
    void check_schema(const std::map<std::string, std::vector<std::string>> &schema) const {
        for (const auto &[section, entries] : sections_) {
            auto it = schema.find(section);
            if (it == schema.end()) {
                throw ConfigError(source_, 0, "unknown section [" + section + "]");
            }
            for (const auto &e : entries) {
                if (std::find(it->second.begin(), it->second.end(), e.key) == it->second.end()) {
                    throw ConfigError(source_, e.line, "unknown key '" + e.key + "' in [" + section + "]");
                }
            }
        }
    }

    static std::string trim(const std::string &s) {
        const auto first = s.find_first_not_of(" \t\r");
        if (first == std::string::npos) {
            return {};
        }
        const auto last = s.find_last_not_of(" \t\r");
        return s.substr(first, last - first + 1);
    }

   private:
    std::string source_;
    std::map<std::string, std::vector<ConfigEntry>> sections_;
};

enum class Experiment { TraceU, Lcu, Fidelity, Energy, Purity, Eigenstateness, AppendixTables };

inline std::string to_string(Experiment e) {
    switch (e) {
        case Experiment::TraceU:
            return "trace_u";
        case Experiment::Lcu:
            return "lcu";
        case Experiment::Fidelity:
            return "fidelity";
        case Experiment::Energy:
            return "energy";
        case Experiment::Purity:
            return "purity";
        case Experiment::Eigenstateness:
            return "eigenstateness";
        case Experiment::AppendixTables:
            return "appendix_tables";
    }
    return "?";
}

/// Command-line values that replace their config counterparts.
struct ConfigOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> shots;
    std::optional<ShadowScheme> scheme;
    std::optional<unsigned> threads;
};

/// Fully resolved experiment: every preset expanded into matrices.
struct ExperimentConfig {
    Experiment experiment = Experiment::TraceU;
    std::string source;
    std::size_t qubits = 0;
    std::shared_ptr<const PauliSum> hamiltonian;
    std::optional<DensityOperator> state;
    ComplexMatrix unitary;
    std::optional<ComplexMatrix> anti_controlled;
    double phi = 0.0;
    std::vector<double> times;
    std::vector<std::pair<double, double>> time_pairs;
    std::optional<LcuEnsemble> lcu;
    std::optional<PauliSum> observable;
    std::size_t target = 0;
    std::size_t shots = 0;
    std::uint64_t seed = 0;
    ShadowScheme scheme = ShadowScheme::None;
    unsigned threads = 1;
    std::size_t batches = 0;
    std::string output;

    Sampling sampling() const {
        return {shots, seed, threads};
    }
};

namespace detail {

inline std::optional<double> parse_real(const std::string &text) {
    double v = 0;
    const auto *end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
        return std::nullopt;
    }
    return v;
}

/// Parser helpers that report the offending config line.
class EntryReader {
   public:
    explicit EntryReader(const IniDocument &doc) : doc_(doc) {
    }

    [[noreturn]] void fail(const ConfigEntry &e, const std::string &msg) const {
        throw ConfigError(doc_.source(), e.line, msg);
    }

    double real(const ConfigEntry &e, const std::string &text) const {
        const auto v = parse_real(text);
        if (!v) {
            fail(e, "'" + text + "' is not a finite number");
        }
        return *v;
    }

    double real(const ConfigEntry &e) const {
        return real(e, e.value);
    }

    std::uint64_t integer(const ConfigEntry &e, const std::string &text) const {
        std::uint64_t v = 0;
        const auto *end = text.data() + text.size();
        const auto [ptr, ec] = std::from_chars(text.data(), end, v);
        if (ec != std::errc() || ptr != end) {
            fail(e, "'" + text + "' is not a nonnegative integer");
        }
        return v;
    }

    std::uint64_t integer(const ConfigEntry &e) const {
        return integer(e, e.value);
    }

    std::vector<std::string> words(const ConfigEntry &e) const {
        std::istringstream in(e.value);
        std::vector<std::string> out;
        for (std::string w; in >> w;) {
            out.push_back(w);
        }
        if (out.empty()) {
            fail(e, "value of '" + e.key + "' is empty");
        }
        return out;
    }

    std::vector<double> reals(const ConfigEntry &e) const {
        std::vector<double> out;
        for (const auto &w : words(e)) {
            out.push_back(real(e, w));
        }
        return out;
    }

    std::string path(const ConfigEntry &e, const std::string &text) const {
        std::filesystem::path p(text);
        if (p.is_relative()) {
            p = std::filesystem::path(doc_.source()).parent_path() / p;
        }
        if (!std::filesystem::is_regular_file(p)) {
            fail(e, "file '" + p.string() + "' does not exist");
        }
        return p.string();
    }

   private:
    const IniDocument &doc_;
};

/// Gaussian-based random matrices for the `random` presets.
class PresetRandom {
   public:
    explicit PresetRandom(std::uint64_t seed) : rng_(seed, 0) {
    }

    ComplexMatrix ginibre(Eigen::Index rows, Eigen::Index cols) {
        ComplexMatrix m(rows, cols);
        for (Eigen::Index i = 0; i < rows; ++i) {
            for (Eigen::Index j = 0; j < cols; ++j) {
                const double re = normal_(rng_);
                m(i, j) = Complex(re, normal_(rng_));
            }
        }
        return m;
    }

    /// Haar unitary: Q from the QR factorization with R's diagonal phases
    /// divided out.
    ComplexMatrix unitary(std::size_t qubits) {
        const Eigen::Index d = Eigen::Index{1} << qubits;
        const Eigen::HouseholderQR<ComplexMatrix> qr(ginibre(d, d));
        ComplexMatrix q = qr.householderQ();
        const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
        for (Eigen::Index k = 0; k < d; ++k) {
            const double a = std::abs(r(k, k));
            q.col(k) *= a > 0 ? r(k, k) / a : Complex(1, 0);
        }
        return q;
    }

    DensityOperator mixed(std::size_t qubits, Eigen::Index rank) {
        const Eigen::Index d = Eigen::Index{1} << qubits;
        const ComplexMatrix g = ginibre(d, rank);
        ComplexMatrix rho = g * g.adjoint();
        rho /= rho.trace().real();
        return DensityOperator::state(0.5 * (rho + rho.adjoint()));
    }

    StateVector pure(std::size_t qubits) {
        const ComplexMatrix g = ginibre(Eigen::Index{1} << qubits, 1);
        return g.col(0) / g.col(0).norm();
    }

    double angle() {
        return std::uniform_real_distribution<double>(-std::numbers::pi, std::numbers::pi)(rng_);
    }

   private:
    PhiloxStream rng_;
    std::normal_distribution<double> normal_;
};

inline std::vector<std::string> split_words(const std::string &s) {
    std::istringstream in(s);
    std::vector<std::string> out;
    for (std::string w; in >> w;) {
        out.push_back(w);
    }
    return out;
}

inline StateVector eigenvector_at(const EntryReader &r, const ConfigEntry &e, const Spectrum &s, std::uint64_t k) {
    if (k >= static_cast<std::uint64_t>(s.eigenvalues.size())) {
        r.fail(e, "eigenstate index " + std::to_string(k) + " is out of range");
    }
    return s.eigenvector(static_cast<Eigen::Index>(k));
}

/// Unitary presets: identity | pauli LETTERS | evolution T | random.
inline ComplexMatrix parse_unitary(const EntryReader &r, const ConfigEntry &e, const std::vector<std::string> &w,
                                   const PauliSum &h, PresetRandom &rnd) {
    const std::size_t n = h.qubits();
    if (w[0] == "identity" && w.size() == 1) {
        return identity(n);
    }
    if (w[0] == "random" && w.size() == 1) {
        return rnd.unitary(n);
    }
    if (w[0] == "evolution" && w.size() == 2) {
        return mat_exp_iht(h, r.real(e, w[1]));
    }
    if (w[0] == "pauli" && w.size() == 2) {
        if (w[1].size() != n || w[1].find_first_not_of("IXYZ") != std::string::npos) {
            r.fail(e, "Pauli string must have " + std::to_string(n) + " letters from I, X, Y, Z");
        }
        PauliSum p(n);
        p.add(1.0, w[1]);
        return dense(p);
    }
    r.fail(e, "unitary must be 'identity', 'random', 'evolution T' or 'pauli LETTERS'");
}

inline PauliSum read_pauli_file(const std::string &path) {
    std::ifstream in(path);
    return parse_pauli_sum(in, path);
}

}  // namespace detail

inline const std::map<std::string, std::vector<std::string>> &config_schema() {
    static const std::map<std::string, std::vector<std::string>> schema{
        {"experiment", {"type", "shots", "seed", "scheme", "output", "threads", "batches"}},
        {"system", {"qubits", "hamiltonian", "coupling", "field", "state", "preset_seed"}},
        {"hadamard", {"unitary", "anti_controlled", "phi"}},
        {"lcu", {"term", "filter", "threshold", "tau", "order", "width", "observable", "observable_term"}},
        {"schedule", {"times", "time_pairs", "dt_grid", "target"}},
    };
    return schema;
}

/// Parses and resolves a config document. Every validation failure is a
/// ConfigError carrying the offending line (0 for missing keys).
inline ExperimentConfig resolve_config(const IniDocument &doc, const ConfigOverrides &over = {}) {
    using detail::EntryReader;
    doc.check_schema(config_schema());
    const EntryReader r(doc);
    ExperimentConfig c;
    c.source = doc.source();

    const ConfigEntry type = doc.require("experiment", "type");
    static const std::map<std::string, Experiment> kinds{
        {"trace_u", Experiment::TraceU},     {"lcu", Experiment::Lcu},       {"fidelity", Experiment::Fidelity},
        {"energy", Experiment::Energy},      {"purity", Experiment::Purity}, {"eigenstateness", Experiment::Eigenstateness},
        {"appendix_tables", Experiment::AppendixTables}};
    if (auto it = kinds.find(type.value); it != kinds.end()) {
        c.experiment = it->second;
    } else {
        r.fail(type, "unknown experiment type '" + type.value + "'");
    }
    const bool sampled = c.experiment != Experiment::AppendixTables;

    if (over.shots) {
        c.shots = *over.shots;
    } else if (auto e = doc.get("experiment", "shots")) {
        c.shots = r.integer(*e);
    } else if (sampled) {
        throw ConfigError(doc.source(), 0, "missing required key 'shots' in [experiment]");
    }
    if (sampled && c.shots == 0) {
        const auto e = doc.get("experiment", "shots");
        throw ConfigError(doc.source(), e && !over.shots ? e->line : 0, "shots must be positive");
    }
    if (over.seed) {
        c.seed = *over.seed;
    } else if (auto e = doc.get("experiment", "seed")) {
        c.seed = r.integer(*e);
    }
    if (over.threads) {
        c.threads = *over.threads;
    } else if (auto e = doc.get("experiment", "threads")) {
        c.threads = static_cast<unsigned>(r.integer(*e));
    }
    if (auto e = doc.get("experiment", "batches")) {
        c.batches = r.integer(*e);
    }
    c.output = doc.get("experiment", "output") ? doc.get("experiment", "output")->value : "hshadow_result";

    // Each experiment fixes its shadow scheme except lcu, where it is chosen.
    std::optional<ShadowScheme> requested = over.scheme;
    std::size_t scheme_line = 0;
    if (!requested) {
        if (auto e = doc.get("experiment", "scheme")) {
            scheme_line = e->line;
            if (e->value != "local" && e->value != "global") {
                r.fail(*e, "scheme must be 'local' or 'global'");
            }
            requested = parse_scheme(e->value);
        }
    }

    // System.
    const auto qubits_entry = doc.require("system", "qubits");
    c.qubits = r.integer(qubits_entry);
    if (c.qubits == 0 || c.qubits > kMaxQubits) {
        r.fail(qubits_entry, "qubits must lie in [1, 12]");
    }
    const auto ham = doc.get("system", "hamiltonian");
    if (!ham || ham->value == "tfim") {
        const double j = doc.get("system", "coupling") ? r.real(*doc.get("system", "coupling")) : 1.0;
        const double f = doc.get("system", "field") ? r.real(*doc.get("system", "field")) : 1.0;
        c.hamiltonian = std::make_shared<const PauliSum>(tfim(c.qubits, j, f));
    } else {
        PauliSum h = detail::read_pauli_file(r.path(*ham, ham->value));
        if (h.qubits() != c.qubits) {
            r.fail(*ham, "Hamiltonian acts on " + std::to_string(h.qubits()) + " qubits, expected " +
                             std::to_string(c.qubits));
        }
        c.hamiltonian = std::make_shared<const PauliSum>(std::move(h));
    }
    const PauliSum &h = *c.hamiltonian;
    const Spectrum spectrum = diagonalize(h);
    const std::uint64_t preset_seed = doc.get("system", "preset_seed") ? r.integer(*doc.get("system", "preset_seed")) : 1;
    detail::PresetRandom rnd(preset_seed);

    const ConfigEntry state = doc.get("system", "state").value_or(ConfigEntry{"state", "zero", 0});
    const auto sw = state.line ? r.words(state) : std::vector<std::string>{"zero"};
    const std::size_t n = c.qubits;
    if (sw[0] == "zero" && sw.size() == 1) {
        c.state = DensityOperator::zero_state(n);
    } else if (sw[0] == "plus" && sw.size() == 1) {
        c.state = DensityOperator::pure(StateVector::Constant(Eigen::Index{1} << n, std::pow(2.0, -0.5 * static_cast<double>(n))));
    } else if (sw[0] == "maximally_mixed" && sw.size() == 1) {
        c.state = DensityOperator::maximally_mixed(n);
    } else if (sw[0] == "eigenstate" && sw.size() == 2) {
        c.state = DensityOperator::pure(detail::eigenvector_at(r, state, spectrum, r.integer(state, sw[1])));
    } else if (sw[0] == "superposition" && sw.size() == 4) {
        const StateVector a = detail::eigenvector_at(r, state, spectrum, r.integer(state, sw[1]));
        const StateVector b = detail::eigenvector_at(r, state, spectrum, r.integer(state, sw[2]));
        const double weight = r.real(state, sw[3]);
        if (sw[1] == sw[2] || weight < 0 || weight > 1) {
            r.fail(state, "superposition needs two distinct eigenstates and a weight in [0, 1]");
        }
        const StateVector psi = std::sqrt(weight) * a + std::sqrt(1 - weight) * b;
        c.state = DensityOperator::pure(psi / psi.norm());
    } else if (sw[0] == "random_pure" && sw.size() == 1) {
        c.state = DensityOperator::pure(rnd.pure(n));
    } else if (sw[0] == "random_mixed" && sw.size() <= 2) {
        const std::uint64_t rank = sw.size() == 2 ? r.integer(state, sw[1]) : (std::uint64_t{1} << n);
        if (rank == 0 || rank > (std::uint64_t{1} << n)) {
            r.fail(state, "rank must lie in [1, 2^qubits]");
        }
        c.state = rnd.mixed(n, static_cast<Eigen::Index>(rank));
    } else if (sw[0] == "file" && sw.size() == 2) {
        // One amplitude per line: "re im" or "re".
        const std::string file = r.path(state, sw[1]);
        std::ifstream in(file);
        std::vector<Complex> amps;
        std::string line;
        for (std::size_t line_no = 1; std::getline(in, line); ++line_no) {
            if (auto h_pos = line.find('#'); h_pos != std::string::npos) {
                line.erase(h_pos);
            }
            const auto w = detail::split_words(line);
            if (w.empty()) {
                continue;
            }
            const auto re = detail::parse_real(w[0]);
            const auto im = w.size() == 2 ? detail::parse_real(w[1]) : std::optional<double>(0.0);
            if (w.size() > 2 || !re || !im) {
                throw ConfigError(file, line_no, "expected 're [im]'");
            }
            amps.emplace_back(*re, *im);
        }
        if (amps.size() != (std::size_t{1} << n)) {
            r.fail(state, "state file holds " + std::to_string(amps.size()) + " amplitudes, expected " +
                              std::to_string(std::size_t{1} << n));
        }
        StateVector psi = Eigen::Map<const StateVector>(amps.data(), static_cast<Eigen::Index>(amps.size()));
        if (psi.norm() == 0) {
            r.fail(state, "state vector is zero");
        }
        c.state = DensityOperator::pure(psi / psi.norm());
    } else {
        r.fail(state, "unknown state preset '" + state.value + "'");
    }

    // Hadamard circuit.
    c.unitary = identity(n);
    if (auto e = doc.get("hadamard", "unitary")) {
        c.unitary = detail::parse_unitary(r, *e, r.words(*e), h, rnd);
    } else if (c.experiment == Experiment::TraceU || c.experiment == Experiment::AppendixTables) {
        throw ConfigError(doc.source(), 0, "missing required key 'unitary' in [hadamard]");
    }
    if (auto e = doc.get("hadamard", "anti_controlled")) {
        if (c.experiment != Experiment::AppendixTables) {
            r.fail(*e, "anti_controlled applies to appendix_tables only");
        }
        const auto w = r.words(*e);
        if (!(w[0] == "none" && w.size() == 1)) {
            c.anti_controlled = detail::parse_unitary(r, *e, w, h, rnd);
        }
    }
    if (auto e = doc.get("hadamard", "phi")) {
        c.phi = e->value == "random" ? rnd.angle() : r.real(*e);
    }

    // Schedule.
    if (auto e = doc.get("schedule", "times")) {
        c.times = r.reals(*e);
    }
    if (auto e = doc.get("schedule", "time_pairs")) {
        for (const auto &w : r.words(*e)) {
            const auto colon = w.find(':');
            if (colon == std::string::npos) {
                r.fail(*e, "time pair '" + w + "' must read t1:t2");
            }
            c.time_pairs.emplace_back(r.real(*e, w.substr(0, colon)), r.real(*e, w.substr(colon + 1)));
        }
    }
    if (auto e = doc.get("schedule", "dt_grid")) {
        const auto w = r.words(*e);
        if (w.size() != 2) {
            r.fail(*e, "dt_grid must read 'STEP COUNT'");
        }
        const double step = r.real(*e, w[0]);
        const std::uint64_t count = r.integer(*e, w[1]);
        for (std::uint64_t k = 0; k < count; ++k) {
            c.time_pairs.emplace_back(step * static_cast<double>(k), 0.0);
        }
    }
    if (auto e = doc.get("schedule", "target")) {
        c.target = r.integer(*e);
        detail::eigenvector_at(r, *e, spectrum, c.target);
    }
    const bool needs_times =
        c.experiment == Experiment::Fidelity || c.experiment == Experiment::Energy || c.experiment == Experiment::Purity;
    if (needs_times && c.times.empty()) {
        throw ConfigError(doc.source(), 0, "missing required key 'times' in [schedule]");
    }
    if (c.experiment == Experiment::Eigenstateness && c.time_pairs.empty()) {
        throw ConfigError(doc.source(), 0, "eigenstateness needs 'time_pairs' or 'dt_grid' in [schedule]");
    }

    // LCU.
    if (c.experiment == Experiment::Lcu) {
        const auto terms = doc.all("lcu", "term");
        const auto filter = doc.get("lcu", "filter");
        if (terms.empty() == !filter.has_value()) {
            throw ConfigError(doc.source(), filter ? filter->line : 0, "[lcu] needs either 'term' lines or one 'filter'");
        }
        if (filter) {
            FilterDescriptor d;
            d.hamiltonian = c.hamiltonian;
            if (filter->value == "constant") {
                d.kind = FilterDescriptor::Kind::Constant;
            } else if (filter->value == "step") {
                d.kind = FilterDescriptor::Kind::Step;
            } else {
                r.fail(*filter, "filter must be 'step' or 'constant'");
            }
            if (auto e = doc.get("lcu", "threshold")) {
                d.threshold = r.real(*e);
            }
            if (auto e = doc.get("lcu", "tau")) {
                d.tau = r.real(*e);
            }
            if (auto e = doc.get("lcu", "order")) {
                d.order = static_cast<int>(r.integer(*e));
            }
            if (auto e = doc.get("lcu", "width")) {
                d.width = r.real(*e);
            }
            try {
                c.lcu = build_fourier_filter(d);
            } catch (const UsageError &err) {
                r.fail(*filter, err.what());
            }
        } else {
            std::vector<LcuTerm> list;
            for (const auto &e : terms) {
                const auto w = r.words(e);
                if (w.size() < 3) {
                    r.fail(e, "term must read 'RE IM UNITARY...'");
                }
                const Complex alpha(r.real(e, w[0]), r.real(e, w[1]));
                const std::vector<std::string> rest(w.begin() + 2, w.end());
                if (rest[0] == "evolution" && rest.size() == 2) {
                    list.push_back({alpha, TimeEvolution{c.hamiltonian, r.real(e, rest[1])}});
                } else {
                    list.push_back({alpha, detail::parse_unitary(r, e, rest, h, rnd)});
                }
            }
            try {
                c.lcu.emplace(list);
            } catch (const Error &err) {
                r.fail(terms.front(), err.what());
            }
        }
        const auto obs_file = doc.get("lcu", "observable");
        const auto obs_terms = doc.all("lcu", "observable_term");
        if (obs_file && !obs_terms.empty()) {
            r.fail(*obs_file, "give either 'observable' or 'observable_term' lines, not both");
        }
        if (obs_file) {
            c.observable = detail::read_pauli_file(r.path(*obs_file, obs_file->value));
            if (c.observable->qubits() != n) {
                r.fail(*obs_file, "observable acts on the wrong number of qubits");
            }
        } else if (!obs_terms.empty()) {
            PauliSum o(n);
            for (const auto &e : obs_terms) {
                const auto w = r.words(e);
                if (w.size() != 2 || w[1].size() != n || w[1].find_first_not_of("IXYZ") != std::string::npos) {
                    r.fail(e, "observable_term must read 'COEFF LETTERS' with " + std::to_string(n) + " letters");
                }
                o.add(r.real(e, w[0]), w[1]);
            }
            c.observable = std::move(o);
        }
    }

    // Scheme: fixed per experiment except lcu with an observable.
    ShadowScheme fixed = ShadowScheme::None;
    switch (c.experiment) {
        case Experiment::Fidelity:
            fixed = ShadowScheme::GlobalClifford;
            break;
        case Experiment::Energy:
        case Experiment::Purity:
            fixed = ShadowScheme::LocalPauli;
            break;
        case Experiment::Lcu:
            fixed = c.observable ? requested.value_or(ShadowScheme::LocalPauli) : ShadowScheme::None;
            break;
        default:
            break;
    }
    if (requested && *requested != fixed) {
        throw ConfigError(doc.source(), scheme_line,
                          "scheme '" + to_string(*requested) + "' does not apply to experiment " + to_string(c.experiment));
    }
    c.scheme = fixed;
    return c;
}

inline ExperimentConfig load_config(const std::string &path, const ConfigOverrides &over = {}) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError(path, 0, "cannot open config file");
    }
    return resolve_config(IniDocument::parse(in, path), over);
}

}  // namespace hshadow
