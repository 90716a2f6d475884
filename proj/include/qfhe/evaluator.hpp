#pragma once

#include <atomic>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qfhe/fhe.hpp"
#include "qfhe/optics.hpp"
#include "qfhe/qcore.hpp"
#include "qfhe/qotp.hpp"

// The homomorphic evaluation scheme: pad-encrypted qubits, front-loaded
// ancillas Z^q P^a |+> and Z^r P^b |+> per wire, homomorphically encrypted
// key bits, Clifford gates for free and T via a teleportation gadget.
//
// Gadget convention (fixed here, validated exhaustively by the test suite):
// CNOT with the data wire as control and the ancilla as target, then a
// computational measurement of the ancilla with outcome k. With the data
// wire's X key expression S + c (S the symbol part, c the known constant),
// the updates are
//     after T itself:   z += x
//     after the gadget: z += mask(ancilla) + k * S;  apply Pdag and z += x
//                       when c = 1
// where mask is q, r, or, for the combined ancilla, q + r + ab + k1 * b
// (qubit phase-add) / q + r + ab + k1 (photonic phase-add herald rule).

namespace qfhe {

enum class Backend { qubit, optics };

struct EvaluationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
// A photonic post-selection attempt failed; the caller re-encrypts with
// fresh pads and retries (retries are counted, never silent).
using optics::PostSelectionFailure;

struct GateOp {
    GateKind kind;
    std::vector<int> wires;
};

enum class CanonicalCase { t, th, thp };
std::string canonical_case_name(CanonicalCase c);
Gate canonical_case_unitary(CanonicalCase c);

struct CircuitDescription {
    int num_wires = 1;
    std::vector<GateOp> gates;

    int t_count() const;
    int t_depth() const;
    void validate() const;

    static CircuitDescription canonical(CanonicalCase c);
};

struct EvaluationKey {
    // one ancilla pair per wire, prepared independently of any circuit
    std::vector<PureState> xi_a;
    std::vector<PureState> xi_b;
    // Enc(a), Enc(b), Enc(q), Enc(r) and the front-loaded product Enc(a*b)
    std::map<Symbol, CipherBit> encrypted_bits;

    std::vector<std::uint8_t> serialize() const;
};

// Alice's plaintext key material. Reads of the pad and mask bits are
// counted, so tests can assert that evaluation never touches them.
class AliceSecret {
public:
    AliceSecret(std::vector<PadKey> pads, std::vector<int> mask_q, std::vector<int> mask_r,
                FheKeyPair fhe)
        : pads_(std::move(pads)),
          q_(std::move(mask_q)),
          r_(std::move(mask_r)),
          fhe_(std::move(fhe)) {}

    PadKey pad(int wire) const {
        ++reads_;
        return pads_.at(static_cast<std::size_t>(wire));
    }
    int mask_q(int wire) const {
        ++reads_;
        return q_.at(static_cast<std::size_t>(wire));
    }
    int mask_r(int wire) const {
        ++reads_;
        return r_.at(static_cast<std::size_t>(wire));
    }
    const FheKeyPair& fhe_keys() const { return fhe_; }
    int num_wires() const { return static_cast<int>(pads_.size()); }
    std::uint64_t plaintext_reads() const { return reads_.load(); }

private:
    std::vector<PadKey> pads_;
    std::vector<int> q_, r_;
    FheKeyPair fhe_;
    mutable std::atomic<std::uint64_t> reads_{0};
};

struct Prepared {
    PureState ciphertext;
    EvaluationKey evaluation_key;
    std::shared_ptr<AliceSecret> secret;
};

Prepared prepare(const PureState& plaintext, const FheParams& fhe_params, RandomStream& rng);
// Multi-wire register under a single FHE key pair, one pad and ancilla pair
// per wire; plaintexts become the tensor product in wire order.
Prepared prepare_register(const std::vector<PureState>& plaintexts, const FheParams& fhe_params,
                          RandomStream& rng);

struct EvalTranscript {
    Backend backend = Backend::qubit;
    std::vector<GateOp> gates;
    std::vector<std::pair<std::string, int>> measurements;
    // per wire: encrypted decryption keys (Enc(z), Enc(x))
    std::vector<std::pair<CipherBit, CipherBit>> final_keys;
    std::vector<KeyExprPair> final_exprs;  // symbolic form, known to Bob
    PureState output_state = PureState::zero(1);
    std::optional<Eigen::Matrix2cd> output_density;  // optics: labels traced out
    std::uint64_t seed = 0;
};

EvalTranscript evaluate(const PureState& ciphertext, const EvaluationKey& key,
                        const CircuitDescription& circuit, Backend backend, RandomStream& rng,
                        const optics::NoiseParams& noise = optics::NoiseParams::noiseless());

// Decrypted key bits per wire from a transcript (z, x), via the FHE secret.
std::vector<std::pair<int, int>> decrypt_final_keys(const EvalTranscript& t, const FheKeyPair& kp);
// Applies X^x then Z^z per wire; exact plaintext recovery with the matching
// key pair, scrambled output with any other.
PureState decrypt_output(const EvalTranscript& t, const FheKeyPair& kp);
Eigen::Matrix2cd decrypt_output_density(const EvalTranscript& t, const FheKeyPair& kp);

// All post-selection/measurement branches of one photonic T-depth-one run,
// with exact probabilities and conditional outputs (labels traced). Used by
// evaluate(optics) for sampling and by tomography for exact-weight caching.
struct OpticalBranch {
    int k1 = -1;  // phase-add herald, -1 when the case has none
    int k2 = -1;  // gadget measurement, -1 for circuits without T
    double probability = 0;
    Eigen::Matrix2cd conditional_output;
};
struct OpticalCaseRun {
    double success_probability = 0;
    std::vector<OpticalBranch> branches;
};
OpticalCaseRun run_optical_circuit(const PureState& ciphertext, const EvaluationKey& key,
                                   const CircuitDescription& circuit,
                                   const optics::NoiseParams& noise);

// Final symbolic keys of a single-wire T-depth-one circuit on the photonic
// backend, given the phase-add herald k1 and the gadget outcome k2.
KeyExprPair optical_final_exprs(const CircuitDescription& circuit, int k1, int k2);
// XOR-fold of a key expression over the front-loaded encrypted bits.
CipherBit fold_expr_public(const KeyExpr& e, const EvaluationKey& key);

}  // namespace qfhe
