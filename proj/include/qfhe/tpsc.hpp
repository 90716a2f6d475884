#pragma once

#include <json.hpp>

#include "qfhe/evaluator.hpp"
#include "qfhe/optics.hpp"
#include "qfhe/qcore.hpp"

// Two-party secure inner-product protocol. Alice one-time-pads n copies of
// her qubit and sends them with homomorphically encrypted pad keys; Bob runs
// a comparator circuit against his own qubit per copy, folds his measurement
// outcomes into the encrypted keys, shuffles, and returns them. Alice's
// decrypted products average to <Pi_11> = (1 - D^(2)) / 2 while Bob's state
// stays hidden behind the shuffle.
//
// Outcome-to-key pairing (fixed by the exhaustive oracle in the test suite):
// the comparator measures Alice's wire after the Hadamard (k1, paired with
// pad key a) and Bob's wire (k2, paired with b).

namespace qfhe::tpsc {

// CNOT (first qubit control), Hadamard on the first qubit, measure both.
std::pair<int, int> comparator(const PureState& alpha, const PureState& beta, RandomStream& rng);
// Exact joint outcome distribution, indexed k1 * 2 + k2.
std::array<double, 4> comparator_distribution(const PureState& alpha, const PureState& beta);

// D^(2) = Tr(rho_b^{1/2} rho_a rho_b^{1/2}); |<a|b>|^2 for pure inputs.
double true_overlap(const DensityMatrix& rho_a, const DensityMatrix& rho_b);

// Draws a pure state from the eigendecomposition ensemble of rho.
PureState sample_pure(const DensityMatrix& rho, RandomStream& rng);

struct ProtocolConfig {
    int n = 960;
    bool shuffle = true;
    Backend backend = Backend::qubit;
    bool wrong_key = false;
    FheParams fhe = FheParams::mock_defaults();
    optics::NoiseParams noise = optics::NoiseParams::noiseless();
    std::uint64_t alice_seed = 1;
    std::uint64_t bob_seed = 2;
    bool transcript_states = false;  // include ciphertext amplitudes in the transcript
};

struct ProtocolResult {
    double estimate = 0;   // 2 <Pi_11>
    int retried_copies = 0;
    nlohmann::json alice_view;
    nlohmann::json bob_view;  // includes the permutation, withheld from Alice
    nlohmann::json transcript;
};

ProtocolResult run_protocol(const DensityMatrix& rho_alpha, const DensityMatrix& rho_beta,
                            const ProtocolConfig& config);

struct LeakageConfig {
    int copies_per_probe = 2000;
    bool shuffle = true;
    FheParams fhe = FheParams::mock_defaults();
    std::uint64_t alice_seed = 11;
    std::uint64_t bob_seed = 12;
};

struct LeakageReport {
    std::vector<double> per_probe_estimates;  // 2<Pi_11> per probe block
    double pooled_estimate = 0;
    Eigen::Vector3d bloch_estimate;           // linear inversion from the blocks
    double bloch_error = 0;                   // vs the true state
    double homogeneity_pvalue = 0;            // blocks vs pooled rate
};

// Alice probes with the six Pauli eigenstates. Without the shuffle her
// per-block estimates reconstruct Bob's Bloch vector; with it they are
// statistically indistinguishable from the pooled rate.
LeakageReport leakage_probe(const DensityMatrix& bob_state, const LeakageConfig& config);

}  // namespace qfhe::tpsc
