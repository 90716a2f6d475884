#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "qfhe/random.hpp"

// Pluggable classical homomorphic encryption over single bits. Only XOR is
// homomorphic; every key transformation the evaluator performs is affine over
// GF(2) once the product bit a*b is front-loaded, so no multiplication is
// needed. Two backends:
//   mock          bit masked by a keyed PRF over fresh nonces; perfect
//                 correctness, zero cryptographic value. Default for
//                 protocol tests.
//   lwe_additive  Regev-style additive scheme over Z_q with the message in
//                 the high bit. Desk-scale parameters; NOT secure at these
//                 sizes, but exhibits randomized encryption, noise growth
//                 and wrong-key scrambling.

namespace qfhe {

struct FheError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct BudgetError : FheError {
    using FheError::FheError;
};

enum class FheScheme : std::uint8_t { mock = 1, lwe_additive = 2 };

struct FheParams {
    FheScheme scheme = FheScheme::mock;
    int lwe_dimension = 64;
    double noise_stddev = 1.0;
    std::uint32_t modulus = 1u << 16;
    int public_samples = 96;

    static FheParams mock_defaults() { return FheParams{}; }
    static FheParams lwe_defaults() {
        FheParams p;
        p.scheme = FheScheme::lwe_additive;
        return p;
    }

    // Number of homomorphic XORs a ciphertext chain may absorb while
    // decryption stays correct (mock: fixed cap). Throws FheError when the
    // parameters leave no budget at all.
    int xor_budget() const;
};

// Key material is opaque: a small header (scheme, dimensions, modulus,
// key id, budget) followed by the raw key words, so that enc/dec need
// nothing beyond the key blob itself.
struct FheSecretKey {
    std::vector<std::uint8_t> bytes;
};
struct FhePublicKey {
    std::vector<std::uint8_t> bytes;
};

struct FheKeyPair {
    FheSecretKey secret;
    FhePublicKey public_key;
    FheParams params;
    std::uint32_t key_id = 0;
};

class CipherBit {
public:
    FheScheme scheme() const { return scheme_; }
    int noise_level() const { return noise_level_; }
    int budget() const { return budget_; }
    std::uint32_t key_id() const { return key_id_; }

    // [u8 scheme][u32 LE key id][u32 LE noise][u32 LE budget]
    // [u32 LE payload length][payload]
    std::vector<std::uint8_t> serialize() const;
    static CipherBit deserialize(std::span<const std::uint8_t> bytes);

private:
    friend CipherBit enc(int, const FhePublicKey&, RandomStream&);
    friend int dec(const CipherBit&, const FheSecretKey&);
    friend CipherBit hxor(const CipherBit&, const CipherBit&);
    friend CipherBit hxor_const(const CipherBit&, int);

    FheScheme scheme_ = FheScheme::mock;
    std::uint32_t key_id_ = 0;
    int noise_level_ = 0;
    int budget_ = 0;
    std::vector<std::uint8_t> payload_;
};

FheKeyPair keygen(const FheParams& params, RandomStream& rng);
CipherBit enc(int bit, const FhePublicKey& pk, RandomStream& rng);
// Bit-exact with the matching secret; with a mismatched one it returns a
// scrambled bit (this is the wrong-key experiment, not an error).
int dec(const CipherBit& c, const FheSecretKey& sk);
CipherBit hxor(const CipherBit& x, const CipherBit& y);
CipherBit hxor_const(const CipherBit& x, int c);

}  // namespace qfhe
