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

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "hshadow/hadamard.hpp"
#include "hshadow/shadows.hpp"
#include "support/enumeration.hpp"
#include "support/oracles.hpp"

namespace hshadow {
namespace {

using testing::Mat;

double max_diff(const ComplexMatrix &a, const ComplexMatrix &b) {
    return (a - b).cwiseAbs().maxCoeff();
}

using testing::local_snapshot;
using testing::tableau_from;

TEST(LocalSampler, ZeroStateInZBasisIsDeterministic) {
    const LocalPauliSampler sampler(DensityOperator::zero_state(1));
    const auto p = sampler.distribution("Z");
    EXPECT_DOUBLE_EQ(p[0], 1.0);
    EXPECT_DOUBLE_EQ(p[1], 0.0);
    const auto px = sampler.distribution("X");
    EXPECT_NEAR(px[0], 0.5, 1e-15);
    EXPECT_NEAR(px[1], 0.5, 1e-15);
}

TEST(LocalSampler, MarginalOfSecondQubit) {
    ComplexMatrix rho = ComplexMatrix::Zero(4, 4);
    rho(1, 1) = 0.5;
    rho(3, 3) = 0.5;
    const LocalPauliSampler sampler(DensityOperator::state(rho));
    for (const std::string b : {"XZ", "YZ", "ZZ"}) {
        const auto p = sampler.distribution(b);
        EXPECT_NEAR(p[1] + p[3], 1.0, 1e-15) << b;
    }
    for (std::uint64_t k = 0; k < 200; ++k) {
        auto rng = seed_stream(4, k);
        const Snapshot s = sampler.sample(rng);
        if (s.bases[1] == 'Z') {
            EXPECT_EQ(s.outcome_bit(1), 1);
        }
    }
}

TEST(LocalSampler, DistributionMatchesProjectorOracle) {
    std::mt19937_64 rng(1);
    for (std::size_t n : {1U, 2U, 3U, 5U}) {
        const Mat rho = testing::random_density(n, rng);
        const LocalPauliSampler sampler(DensityOperator::state(rho));
        for (const auto &bases : {std::string(n, 'X'), std::string(n, 'Y'), std::string(n, 'Z')}) {
            const auto p = sampler.distribution(bases);
            for (std::uint32_t b = 0; b < (1U << n); ++b) {
                EXPECT_NEAR(p[b], (testing::local_projector(bases, b) * rho).trace().real(), 1e-12);
            }
        }
    }
}

TEST(CliffordSampler, IdentityOnZeroGivesZero) {
    const GlobalCliffordSampler sampler(DensityOperator::zero_state(1));
    const auto p = sampler.distribution(CliffordTableau(1));
    EXPECT_NEAR(p[0], 1.0, 1e-15);
}

TEST(CliffordSampler, MaximallyMixedIsUniformForAnyClifford) {
    const GlobalCliffordSampler sampler(DensityOperator::maximally_mixed(3));
    for (std::uint64_t k = 0; k < 20; ++k) {
        auto rng = seed_stream(9, k);
        for (double p : sampler.distribution(CliffordTableau::random(3, rng))) {
            EXPECT_NEAR(p, 0.125, 1e-14);
        }
    }
}

TEST(CliffordSampler, BellStateSamplingMatchesBornOracle) {
    StateVector bell = StateVector::Zero(4);
    bell(0) = bell(3) = 1 / std::sqrt(2.0);
    const auto rho = DensityOperator::pure(bell);
    const GlobalCliffordSampler sampler(rho);
    auto pick = seed_stream(10, 0);
    CliffordTableau v = CliffordTableau::random(2, pick);
    // Resample until the fixed Clifford gives a nondegenerate distribution.
    for (std::uint64_t k = 1; sampler.distribution(v)[0] == 1.0 || sampler.distribution(v)[0] == 0.0; ++k) {
        auto again = seed_stream(10, k);
        v = CliffordTableau::random(2, again);
    }
    const auto cumulative = detail::born_cumulative(sampler.distribution(v));
    std::vector<double> freq(4, 0.0);
    constexpr int kDraws = 10000;
    for (int k = 0; k < kDraws; ++k) {
        auto rng = seed_stream(11, static_cast<std::uint64_t>(k));
        freq[sample_cumulative(rng, cumulative)] += 1.0 / kDraws;
    }
    testing::CliffordImages images;
    for (std::size_t q = 0; q < 2; ++q) {
        auto letters = [&](const SignedPauli &p) {
            std::string s(2, 'I');
            for (std::size_t r = 0; r < 2; ++r) {
                const int x = (p.masks.x >> (1 - r)) & 1U;
                const int z = (p.masks.z >> (1 - r)) & 1U;
                s[r] = x && z ? 'Y' : (x ? 'X' : (z ? 'Z' : 'I'));
            }
            return s;
        };
        images.x_letters.push_back(letters(v.x_image(q)));
        images.z_letters.push_back(letters(v.z_image(q)));
        images.x_signs.push_back(v.x_image(q).negative ? -1 : 1);
        images.z_signs.push_back(v.z_image(q).negative ? -1 : 1);
    }
    double tv = 0.0;
    for (std::uint32_t b = 0; b < 4; ++b) {
        const double oracle = (testing::stabilizer_projector(images, b) * rho.matrix()).trace().real();
        tv += 0.5 * std::abs(freq[b] - oracle);
    }
    EXPECT_LT(tv, 0.02);
}

TEST(Reconstruct, LocalExamples) {
    ComplexMatrix d(2, 2);
    d << 2, 0, 0, -1;
    EXPECT_LT(max_diff(reconstruct(local_snapshot("Z", 0)).matrix(), d), 1e-15);
    EXPECT_LT(max_diff(reconstruct(local_snapshot("ZZ", 0)).matrix(), kron(d, d)), 1e-15);
    for (std::uint32_t b = 0; b < 8; ++b) {
        for (const std::string bases : {"XYZ", "YYX", "ZXY"}) {
            EXPECT_LT(max_diff(reconstruct(local_snapshot(bases, b)).matrix(), testing::local_inverse(bases, b)), 1e-14);
            EXPECT_NEAR(reconstruct(local_snapshot(bases, b)).trace().real(), 1.0, 1e-14);
        }
    }
}

TEST(Reconstruct, GlobalTraceIsOne) {
    const GlobalCliffordSampler sampler(DensityOperator::zero_state(3));
    for (std::uint64_t k = 0; k < 50; ++k) {
        auto rng = seed_stream(12, k);
        const Snapshot s = sampler.sample(rng);
        EXPECT_NEAR(reconstruct(s).trace().real(), 1.0, 1e-12);
    }
}

TEST(Reconstruct, RejectsAuxOnlyRecords) {
    Snapshot s;
    EXPECT_THROW(reconstruct(s), UsageError);
}

TEST(Enumeration, LocalChannelIsUnbiased) {
    std::mt19937_64 rng(13);
    for (std::size_t n : {1U, 2U, 3U}) {
        const Mat rho = testing::random_density(n, rng);
        const LocalPauliSampler sampler(DensityOperator::state(rho));
        const auto settings = testing::all_local_settings(n);
        ComplexMatrix acc = ComplexMatrix::Zero(rho.rows(), rho.cols());
        for (const auto &bases : settings) {
            const auto p = sampler.distribution(bases);
            for (std::uint32_t b = 0; b < (1U << n); ++b) {
                acc += p[b] / static_cast<double>(settings.size()) * reconstruct(local_snapshot(bases, b)).matrix();
            }
        }
        EXPECT_LT(max_diff(acc, rho), 1e-10);
    }
}

TEST(Enumeration, GlobalChannelIsUnbiased) {
    std::mt19937_64 rng(14);
    for (std::size_t n : {1U, 2U}) {
        const auto group = testing::enumerate_cliffords(n);
        const Mat rho = testing::random_density(n, rng);
        const GlobalCliffordSampler sampler(DensityOperator::state(rho));
        ComplexMatrix acc = ComplexMatrix::Zero(rho.rows(), rho.cols());
        for (const auto &c : group) {
            const CliffordTableau v = tableau_from(c);
            ASSERT_TRUE(v.is_valid());
            const auto p = sampler.distribution(v);
            for (std::uint32_t b = 0; b < (1U << n); ++b) {
                Snapshot s;
                s.scheme = ShadowScheme::GlobalClifford;
                s.qubits = n;
                s.clifford = v;
                s.outcome = b;
                acc += p[b] / static_cast<double>(group.size()) * reconstruct(s).matrix();
            }
        }
        EXPECT_LT(max_diff(acc, rho), 1e-10);
    }
}

TEST(Enumeration, SignedLocalValuesReproduceZPostMeasurement) {
    std::mt19937_64 rng(15);
    for (std::size_t n : {1U, 2U}) {
        const HadamardSpec spec{DensityOperator::state(testing::random_density(n, rng)), testing::random_unitary(n, rng),
                                std::nullopt, 0.7};
        const AuxSampler aux(spec, AuxBasis::Z);
        const Mat o = testing::random_hermitian(n, rng);
        const ObservableEvaluator eval{Observable(ComplexMatrix(o))};
        const auto settings = testing::all_local_settings(n);
        double expected_value = 0.0;
        for (int sign : {1, -1}) {
            const LocalPauliSampler sampler(aux.conditional_state(sign));
            for (const auto &bases : settings) {
                const auto p = sampler.distribution(bases);
                for (std::uint32_t b = 0; b < (1U << n); ++b) {
                    expected_value += aux.probability(sign) * p[b] / static_cast<double>(settings.size()) * sign *
                                      eval.value(local_snapshot(bases, b, sign));
                }
            }
        }
        const double oracle = (o * post_measurement(spec, Pauli::Z).matrix()).trace().real();
        EXPECT_NEAR(expected_value, oracle, 1e-10);
    }
}

TEST(Evaluator, FactorWiseMatchesDense) {
    PauliSum h = tfim(3, 0.7, 1.2);
    h.add(0.3, "XYZ").add(-0.2, "III");
    const ObservableEvaluator sum_eval{Observable(h)};
    const ObservableEvaluator dense_eval{Observable(dense(h))};
    for (std::uint64_t k = 0; k < 50; ++k) {
        auto rng = seed_stream(16, k);
        std::mt19937_64 mt(k);
        const auto rho = DensityOperator::state(testing::random_density(3, mt));
        for (const Snapshot &s : {LocalPauliSampler(rho).sample(rng), GlobalCliffordSampler(rho).sample(rng)}) {
            const double direct = (dense(h) * reconstruct(s).matrix()).trace().real();
            EXPECT_NEAR(sum_eval.value(s), direct, 1e-11);
            EXPECT_NEAR(dense_eval.value(s), direct, 1e-11);
            double by_terms = 0.0;
            for (std::size_t i = 0; i < sum_eval.term_count(); ++i) {
                by_terms += h.terms()[i].coefficient() * sum_eval.term_value(i, s);
            }
            EXPECT_NEAR(by_terms, direct, 1e-11);
        }
    }
}

TEST(Estimate, ConstantValues) {
    std::vector<Snapshot> snaps(10, local_snapshot("Z", 0, 1));
    PauliSum z(1);
    z.add(1.0, "Z");
    EXPECT_DOUBLE_EQ(estimate(snaps, z, 3, false), 3.0);
    EXPECT_DOUBLE_EQ(estimate(snaps, z, 1, true), 3.0);
    for (auto &s : snaps) {
        s.aux_sign = 0;
    }
    EXPECT_DOUBLE_EQ(estimate(snaps, z, 2, true), 0.0);
    EXPECT_THROW(estimate(std::vector<Snapshot>{}, z, 1, false), UsageError);
    EXPECT_THROW(estimate(snaps, z, 11, false), UsageError);
    EXPECT_THROW(estimate(snaps, z, 0, false), UsageError);
}

TEST(Estimate, ZeroStateZExpectation) {
    const LocalPauliSampler sampler(DensityOperator::zero_state(2));
    std::vector<Snapshot> snaps;
    for (std::uint64_t k = 0; k < 10000; ++k) {
        auto rng = seed_stream(17, k);
        snaps.push_back(sampler.sample(rng));
    }
    PauliSum z1(2);
    z1.add(1.0, "ZI");
    EXPECT_NEAR(estimate(snaps, z1, default_batches(), false), 1.0, 0.1);
}

TEST(MedianOfMeans, SingleBatchIsPlainMean) {
    std::mt19937_64 rng(18);
    std::normal_distribution<double> g;
    std::vector<double> v(1001);
    for (auto &x : v) {
        x = g(rng);
    }
    EXPECT_EQ(median_of_means(v, 1).value, mean(v));
}

TEST(MedianOfMeans, BatchesAndMedian) {
    const std::vector<double> v{1, 2, 3, 4, 100, 200, 5};
    // Batches {1,2,3}, {4,100}, {200,5}: means 2, 52, 102.5.
    EXPECT_DOUBLE_EQ(median_of_means(v, 3).value, 52.0);
    // Batches {1,2,3,4}, {100,200,5}: median of two is their average.
    EXPECT_DOUBLE_EQ(median_of_means(v, 2).value, 0.5 * (2.5 + 305.0 / 3.0));
    EXPECT_EQ(batch_range(7, 3, 0), std::make_pair(std::size_t{0}, std::size_t{3}));
    EXPECT_EQ(batch_range(7, 3, 2), std::make_pair(std::size_t{5}, std::size_t{7}));
    EXPECT_GE(median_of_means(v, 3).std_error, 0.0);
}

TEST(MedianOfMeans, DefaultBatchRule) {
    EXPECT_EQ(default_batches(1, 0.01), 12U);
    EXPECT_EQ(batches_for(23, 1, 0.01), 1U);
    EXPECT_EQ(batches_for(24, 1, 0.01), 12U);
}

TEST(ShadowNorm, Examples) {
    PauliSum z(3);
    z.add(1.0, "IZI");
    EXPECT_DOUBLE_EQ(shadow_norm_sq(z, ShadowScheme::LocalPauli), 3.0);
    PauliSum id(3);
    id.add(1.0, "III");
    EXPECT_DOUBLE_EQ(shadow_norm_sq(id, ShadowScheme::LocalPauli), 1.0);
    EXPECT_DOUBLE_EQ(shadow_norm_sq(tfim(3), ShadowScheme::LocalPauli), 9.0);
    EXPECT_DOUBLE_EQ(shadow_norm_sq(Observable(dense(tfim(3))), ShadowScheme::LocalPauli), 9.0);
    std::mt19937_64 rng(19);
    const testing::Vec psi = testing::random_pure(3, rng);
    EXPECT_NEAR(shadow_norm_sq(Observable(ComplexMatrix(psi * psi.adjoint())), ShadowScheme::GlobalClifford), 1.0, 1e-12);
}

TEST(Budget, ClosedForm) {
    ShadowBudget b{0.1, 0.01, 10, 3.0, 34.0};
    EXPECT_EQ(budget(b), 77530U);
    EXPECT_EQ(budget(b), static_cast<std::size_t>(std::ceil(34.0 * 3.0 * std::log(2000.0) / 0.01)));
}

TEST(Budget, Scaling) {
    ShadowBudget b{0.1, 0.05, 1, 1.0, 34.0};
    const std::size_t n = budget(b);
    EXPECT_EQ(n, 12543U);
    b.epsilon = 0.05;
    const std::size_t quarter = budget(b);
    EXPECT_LE(quarter, 4 * n);
    EXPECT_GE(quarter, 4 * n - 3);
    ShadowBudget m{0.1, 0.05, 1, 1.0, 34.0};
    std::size_t prev = budget(m);
    for (std::size_t targets = 2; targets <= 1024; targets *= 2) {
        m.m_targets = targets;
        const std::size_t next = budget(m);
        EXPECT_GE(next, prev);
        const double increment = 34.0 * std::log(2.0) / 0.01;
        EXPECT_LE(static_cast<double>(next - prev), std::ceil(increment) + 1);
        prev = next;
    }
}

TEST(Budget, MonotoneInEpsilonAndDelta) {
    std::size_t prev = SIZE_MAX;
    for (double eps = 0.01; eps < 1.0; eps *= 1.3) {
        const std::size_t n = budget({eps, 0.05, 3, 2.0, 34.0});
        EXPECT_LE(n, prev);
        EXPECT_GE(n, 1U);
        prev = n;
    }
    prev = SIZE_MAX;
    for (double delta = 0.001; delta < 1.0; delta *= 1.5) {
        const std::size_t n = budget({0.1, delta, 3, 2.0, 34.0});
        EXPECT_LE(n, prev);
        prev = n;
    }
}

TEST(Budget, RejectsInvalidInputs) {
    EXPECT_THROW(budget({0.0, 0.05, 1, 1.0, 34.0}), UsageError);
    EXPECT_THROW(budget({-0.1, 0.05, 1, 1.0, 34.0}), UsageError);
    EXPECT_THROW(budget({0.1, 0.0, 1, 1.0, 34.0}), UsageError);
    EXPECT_THROW(budget({0.1, 1.0, 1, 1.0, 34.0}), UsageError);
    EXPECT_THROW(budget({0.1, 0.05, 0, 1.0, 34.0}), UsageError);
    EXPECT_THROW(budget({0.1, 0.05, 1, 1.0, 0.0}), UsageError);
}

TEST(Budget, PauliSumRescalesEpsilon) {
    const PauliSum h = tfim(3);
    const ShadowBudget b = pauli_sum_budget(h, 0.5, 0.05);
    EXPECT_DOUBLE_EQ(b.epsilon, 0.5 / 5.0);
    EXPECT_EQ(b.m_targets, 5U);
    EXPECT_DOUBLE_EQ(b.max_norm_sq, 9.0);
}

double brute_force_purity(const std::vector<Snapshot> &snaps) {
    double acc = 0.0;
    for (std::size_t a = 0; a < snaps.size(); ++a) {
        for (std::size_t b = 0; b < snaps.size(); ++b) {
            if (a != b) {
                acc += (reconstruct(snaps[a]).matrix() * reconstruct(snaps[b]).matrix()).trace().real();
            }
        }
    }
    return acc / static_cast<double>(snaps.size() * (snaps.size() - 1));
}

TEST(Purity, UStatisticMatchesBruteForce) {
    std::mt19937_64 mt(20);
    for (std::size_t n : {1U, 2U, 4U, 5U}) {
        const auto rho = DensityOperator::state(testing::random_density(n, mt, 2));
        const LocalPauliSampler sampler(rho);
        std::vector<Snapshot> snaps;
        for (std::uint64_t k = 0; k < 25; ++k) {
            auto rng = seed_stream(21, k);
            snaps.push_back(sampler.sample(rng));
        }
        EXPECT_NEAR(local_purity_u_statistic(snaps), brute_force_purity(snaps), 1e-9 * std::pow(5.0, n)) << n;
    }
    EXPECT_THROW(local_purity_u_statistic(std::vector<Snapshot>(1, local_snapshot("Z", 0))), UsageError);
}

TEST(SnapshotLog, RoundTripIsExact) {
    std::vector<Snapshot> snaps;
    std::mt19937_64 mt(22);
    const auto rho = DensityOperator::state(testing::random_density(3, mt));
    for (std::uint64_t k = 0; k < 20; ++k) {
        auto rng = seed_stream(23, k);
        Snapshot s = k % 2 ? LocalPauliSampler(rho).sample(rng) : GlobalCliffordSampler(rho).sample(rng);
        s.aux_sign = k % 3 == 0 ? -1 : 1;
        s.phi = 0.1 * static_cast<double>(k) + 1e-17;
        s.term_index = k;
        snaps.push_back(s);
    }
    Snapshot aux;
    aux.aux_sign = -1;
    aux.phi = std::numbers::pi / 2;
    snaps.push_back(aux);
    std::stringstream buf;
    write_snapshot_log(buf, snaps);
    const auto back = read_snapshot_log(buf, "log");
    ASSERT_EQ(back.size(), snaps.size());
    for (std::size_t k = 0; k < snaps.size(); ++k) {
        EXPECT_EQ(back[k], snaps[k]) << k;
    }
}

TEST(SnapshotLog, ReportsMalformedLines) {
    auto parse = [](const std::string &text) {
        std::istringstream in(text);
        return read_snapshot_log(in, "log");
    };
    const std::string header = std::string(kSnapshotLogHeader) + "\n";
    EXPECT_THROW(parse("local XZ 01 1 0x0p+0 0\n"), ConfigError);
    EXPECT_THROW(parse(""), ConfigError);
    try {
        parse(header + "local XZ 01 1 0x0p+0 0\nlocal XQ 01 1 0x0p+0 0\n");
        FAIL();
    } catch (const ConfigError &e) {
        EXPECT_EQ(e.line(), 3U);
    }
    EXPECT_THROW(parse(header + "local XZ 012 1 0x0p+0 0\n"), ConfigError);
    EXPECT_THROW(parse(header + "local XZ 01 2 0x0p+0 0\n"), ConfigError);
    EXPECT_THROW(parse(header + "local XZ 01 1 nanx 0\n"), ConfigError);
    EXPECT_THROW(parse(header + "global 00 01 1 0x0p+0 0\n"), ConfigError);
    EXPECT_THROW(parse(header + "aux XZ - 1 0x0p+0 0\n"), ConfigError);
    EXPECT_THROW(parse(header + "local XZ 01 1 0x0p+0\n"), ConfigError);
    EXPECT_EQ(parse(header + "# comment\n\naux - - 0 0x0p+0 3\n").at(0).term_index, 3U);
}

}  // namespace
}  // namespace hshadow
