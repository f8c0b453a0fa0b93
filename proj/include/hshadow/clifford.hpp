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

#include <bit>
#include <cstdint>
#include <string>
#include <vector>

#include "hshadow/qcore.hpp"
#include "hshadow/random.hpp"

namespace hshadow {

/// Pauli string with a ±1 sign, the row type of a stabilizer tableau.
struct SignedPauli {
    PauliMasks masks;
    bool negative = false;

    bool operator==(const SignedPauli &) const = default;
};

/// Symplectic form over F_2: 1 when the two Paulis anticommute.
inline int symplectic_product(const PauliMasks &a, const PauliMasks &b) {
    return parity((a.x & b.z) ^ (a.z & b.x));
}

/// out = P · in, including the sign.
inline void apply_signed_pauli(const SignedPauli &p, const Complex *in, Complex *out, std::size_t dim) {
    apply_pauli(p.masks, in, out, dim);
    if (p.negative) {
        for (std::size_t k = 0; k < dim; ++k) {
            out[k] = -out[k];
        }
    }
}

/// Clifford unitary C stored by its action on generators:
/// C X_k C† = x_image(k) and C Z_k C† = z_image(k). The global phase of C
/// is not tracked; every quantity computed here is phase independent.
class CliffordTableau {
   public:
    explicit CliffordTableau(std::size_t qubits) : qubits_(qubits), xs_(qubits), zs_(qubits) {
        require_capacity(qubits);
        for (std::size_t k = 0; k < qubits; ++k) {
            const std::uint32_t bit = 1U << (qubits - 1 - k);
            xs_[k].masks.x = bit;
            zs_[k].masks.z = bit;
        }
    }

    std::size_t qubits() const {
        return qubits_;
    }

    const SignedPauli &x_image(std::size_t k) const {
        return xs_[k];
    }
    const SignedPauli &z_image(std::size_t k) const {
        return zs_[k];
    }
    void set_x_image(std::size_t k, SignedPauli p) {
        xs_[k] = p;
    }
    void set_z_image(std::size_t k, SignedPauli p) {
        zs_[k] = p;
    }

    bool operator==(const CliffordTableau &) const = default;

    /// The images must obey the canonical commutation relations of the
    /// generators they replace, and stay inside the register.
    bool is_valid() const {
        const std::uint32_t mask = qubits_ == 32 ? ~0U : (1U << qubits_) - 1U;
        for (std::size_t i = 0; i < qubits_; ++i) {
            for (const auto *row : {&xs_[i], &zs_[i]}) {
                if ((row->masks.x & ~mask) != 0 || (row->masks.z & ~mask) != 0) {
                    return false;
                }
            }
            for (std::size_t j = 0; j < qubits_; ++j) {
                if (symplectic_product(xs_[i].masks, xs_[j].masks) != 0) {
                    return false;
                }
                if (symplectic_product(zs_[i].masks, zs_[j].masks) != 0) {
                    return false;
                }
                if (symplectic_product(xs_[i].masks, zs_[j].masks) != (i == j ? 1 : 0)) {
                    return false;
                }
            }
        }
        return true;
    }

    /// Uniformly random element of the n-qubit Clifford group (modulo
    /// phase).
    ///
    /// The symplectic part is drawn as a uniformly random symplectic basis
    /// (a_1, b_1, ..., a_n, b_n): each a_k is uniform over the nonzero
    /// vectors of the symplectic complement of the previous pairs, and each
    /// b_k uniform over complement vectors with ω(a_k, b_k) = 1. Every
    /// conditional choice set has a size that depends only on k, so the
    /// resulting matrix is uniform over Sp(2n, F_2). Uniform signs then
    /// make the Clifford uniform.
    template <class Rng>
    static CliffordTableau random(std::size_t qubits, Rng &rng) {
        CliffordTableau t(qubits);
        const std::uint32_t mask = (1U << qubits) - 1U;
        auto draw = [&]() {
            const std::uint64_t r = rng();
            return PauliMasks{static_cast<std::uint32_t>(r) & mask, static_cast<std::uint32_t>(r >> 32) & mask};
        };
        // Projection onto the complement of the pairs chosen so far is a
        // linear idempotent surjection, so it maps uniform to uniform.
        auto project = [&](PauliMasks v, std::size_t done) {
            PauliMasks out = v;
            for (std::size_t j = 0; j < done; ++j) {
                const auto &a = t.xs_[j].masks;
                const auto &b = t.zs_[j].masks;
                if (symplectic_product(v, b)) {
                    out.x ^= a.x;
                    out.z ^= a.z;
                }
                if (symplectic_product(v, a)) {
                    out.x ^= b.x;
                    out.z ^= b.z;
                }
            }
            return out;
        };
        for (std::size_t k = 0; k < qubits; ++k) {
            PauliMasks a;
            do {
                a = project(draw(), k);
            } while (a.x == 0 && a.z == 0);
            PauliMasks b;
            do {
                b = project(draw(), k);
            } while (symplectic_product(a, b) == 0);
            t.xs_[k].masks = a;
            t.zs_[k].masks = b;
        }
        std::uint64_t signs = rng();
        for (std::size_t k = 0; k < qubits; ++k) {
            t.xs_[k].negative = (signs >> (2 * k)) & 1U;
            t.zs_[k].negative = (signs >> (2 * k + 1)) & 1U;
        }
        return t;
    }

    /// C|0…0⟩: the joint +1 eigenvector of the Z images.
    StateVector zero_image() const {
        const std::size_t dim = std::size_t{1} << qubits_;
        StateVector v(static_cast<Eigen::Index>(dim));
        for (std::size_t j = 0; j < dim; ++j) {
            // Generic seed vector; it is orthogonal to a stabilizer state
            // only by coincidence, and the fallback below covers that case.
            v(static_cast<Eigen::Index>(j)) =
                std::polar(1.0 + 0.37 * static_cast<double>(j) / static_cast<double>(dim), 0.7 + 2.399963229728653 * static_cast<double>(j));
        }
        project_onto_stabilizers(v);
        if (v.squaredNorm() < 1e-6) {
            for (std::size_t j = 0; j < dim; ++j) {
                v.setZero();
                v(static_cast<Eigen::Index>(j)) = 1;
                project_onto_stabilizers(v);
                if (v.squaredNorm() > 0.5 / static_cast<double>(dim)) {
                    break;
                }
            }
        }
        const double norm = v.norm();
        if (norm == 0.0) {
            throw NumericalConsistencyError("stabilizer tableau has no joint eigenvector");
        }
        return v / norm;
    }

    /// C|b⟩ for a computational basis index b (qubit q is bit n-1-q).
    StateVector basis_image(std::uint32_t b) const {
        return basis_image(b, zero_image());
    }

    StateVector basis_image(std::uint32_t b, const StateVector &zero) const {
        const std::size_t dim = std::size_t{1} << qubits_;
        StateVector v = zero;
        StateVector scratch(static_cast<Eigen::Index>(dim));
        for (std::size_t k = 0; k < qubits_; ++k) {
            if ((b >> (qubits_ - 1 - k)) & 1U) {
                apply_signed_pauli(xs_[k], v.data(), scratch.data(), dim);
                v.swap(scratch);
            }
        }
        return v;
    }

    /// Dense C, column b equal to C|b⟩.
    ComplexMatrix unitary() const {
        const std::size_t dim = std::size_t{1} << qubits_;
        ComplexMatrix u(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
        std::vector<StateVector> cols(dim);
        cols[0] = zero_image();
        for (std::size_t b = 1; b < dim; ++b) {
            // Column b differs from column b - lowbit by one generator image.
            const auto lowbit = static_cast<std::uint32_t>(b & (~b + 1));
            const auto k = qubits_ - 1 - static_cast<std::size_t>(std::countr_zero(lowbit));
            cols[b].resize(static_cast<Eigen::Index>(dim));
            apply_signed_pauli(xs_[k], cols[b ^ lowbit].data(), cols[b].data(), dim);
        }
        for (std::size_t b = 0; b < dim; ++b) {
            u.col(static_cast<Eigen::Index>(b)) = cols[b];
        }
        return u;
    }

    /// Row-major bit dump: for each of the 2n rows (x images, then z
    /// images) the n x-bits and n z-bits in qubit order followed by the
    /// sign bit, packed most significant bit first into hex digits.
    std::string to_hex() const {
        std::vector<bool> bits;
        bits.reserve(2 * qubits_ * (2 * qubits_ + 1));
        auto push_row = [&](const SignedPauli &p) {
            for (std::size_t q = 0; q < qubits_; ++q) {
                bits.push_back((p.masks.x >> (qubits_ - 1 - q)) & 1U);
            }
            for (std::size_t q = 0; q < qubits_; ++q) {
                bits.push_back((p.masks.z >> (qubits_ - 1 - q)) & 1U);
            }
            bits.push_back(p.negative);
        };
        for (const auto &p : xs_) {
            push_row(p);
        }
        for (const auto &p : zs_) {
            push_row(p);
        }
        while (bits.size() % 4 != 0) {
            bits.push_back(false);
        }
        std::string out;
        for (std::size_t i = 0; i < bits.size(); i += 4) {
            const int nibble = (bits[i] << 3) | (bits[i + 1] << 2) | (bits[i + 2] << 1) | static_cast<int>(bits[i + 3]);
            out.push_back("0123456789abcdef"[nibble]);
        }
        return out;
    }

    static CliffordTableau from_hex(std::size_t qubits, const std::string &hex) {
        const std::size_t nbits = 2 * qubits * (2 * qubits + 1);
        if (hex.size() != (nbits + 3) / 4) {
            throw UsageError("tableau hex has the wrong length for " + std::to_string(qubits) + " qubits");
        }
        std::vector<bool> bits;
        for (char c : hex) {
            int v = 0;
            if (c >= '0' && c <= '9') {
                v = c - '0';
            } else if (c >= 'a' && c <= 'f') {
                v = c - 'a' + 10;
            } else {
                throw UsageError(std::string("bad hex digit '") + c + "' in tableau");
            }
            for (int s = 3; s >= 0; --s) {
                bits.push_back((v >> s) & 1);
            }
        }
        CliffordTableau t(qubits);
        std::size_t pos = 0;
        auto read_row = [&](SignedPauli &p) {
            p = SignedPauli{};
            for (std::size_t q = 0; q < qubits; ++q) {
                p.masks.x |= static_cast<std::uint32_t>(bits[pos++]) << (qubits - 1 - q);
            }
            for (std::size_t q = 0; q < qubits; ++q) {
                p.masks.z |= static_cast<std::uint32_t>(bits[pos++]) << (qubits - 1 - q);
            }
            p.negative = bits[pos++];
        };
        for (auto &p : t.xs_) {
            read_row(p);
        }
        for (auto &p : t.zs_) {
            read_row(p);
        }
        if (!t.is_valid()) {
            throw UsageError("tableau hex does not describe a Clifford operation");
        }
        return t;
    }

   private:
    void project_onto_stabilizers(StateVector &v) const {
        const std::size_t dim = std::size_t{1} << qubits_;
        StateVector scratch(static_cast<Eigen::Index>(dim));
        for (const auto &z : zs_) {
            apply_signed_pauli(z, v.data(), scratch.data(), dim);
            v = 0.5 * (v + scratch);
        }
    }

    std::size_t qubits_;
    std::vector<SignedPauli> xs_;
    std::vector<SignedPauli> zs_;
};

}  // namespace hshadow
