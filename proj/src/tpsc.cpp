#include "qfhe/tpsc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qfhe/serialize.hpp"
#include "qfhe/stats.hpp"

namespace qfhe::tpsc {

using nlohmann::json;

std::array<double, 4> comparator_distribution(const PureState& alpha, const PureState& beta) {
    PureState joint = alpha.tensor(beta);
    joint = apply_gate(joint, Gate::make(GateKind::CNOT), {0, 1});
    joint = apply_gate(joint, Gate::make(GateKind::H), {0});
    std::array<double, 4> probs{};
    for (int i = 0; i < 4; ++i) probs[static_cast<std::size_t>(i)] = std::norm(joint.amplitude(i));
    return probs;
}

std::pair<int, int> comparator(const PureState& alpha, const PureState& beta, RandomStream& rng) {
    const auto probs = comparator_distribution(alpha, beta);
    const double u = rng.uniform();
    double acc = 0;
    for (int i = 0; i < 4; ++i) {
        acc += probs[static_cast<std::size_t>(i)];
        if (u < acc) return {i >> 1, i & 1};
    }
    return {1, 1};
}

double true_overlap(const DensityMatrix& rho_a, const DensityMatrix& rho_b) {
    Eigen::SelfAdjointEigenSolver<Mat> es(rho_b.matrix());
    if (es.eigenvalues().minCoeff() < -1e-10) throw DimensionError("rho_b not PSD");
    const Mat sqrt_b = es.eigenvectors() *
                       es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
                       es.eigenvectors().adjoint();
    return (sqrt_b * rho_a.matrix() * sqrt_b).trace().real();
}

PureState sample_pure(const DensityMatrix& rho, RandomStream& rng) {
    Eigen::SelfAdjointEigenSolver<Mat> es(rho.matrix());
    const double u = rng.uniform();
    double acc = 0;
    for (Eigen::Index k = es.eigenvalues().size() - 1; k >= 0; --k) {
        acc += std::max(0.0, es.eigenvalues()(k));
        if (u < acc || k == 0) return PureState::from_amplitudes(es.eigenvectors().col(k));
    }
    return PureState::from_amplitudes(es.eigenvectors().col(0));
}

namespace {

// photonic comparator: CNOT(alice -> bob) from the post-selected CZ, then a
// Hadamard waveplate on Alice's rail; both photons measured in H/V
std::pair<int, int> optical_comparator(const PureState& alpha, const PureState& beta,
                                       const optics::NoiseParams& noise, RandomStream& rng,
                                       int& retries) {
    const double t_bal = std::sqrt(1.0 / 3.0);
    Vec l0(1), lmix(2);
    l0 << 1;
    lmix << std::sqrt(noise.visibility_inter), std::sqrt(1.0 - noise.visibility_inter);
    for (int attempt = 0; attempt < 100000; ++attempt) {
        optics::FockState s = optics::FockState::vacuum();
        Vec pa(2), pb(2);
        pa << alpha.amplitudes()(0), alpha.amplitudes()(1);
        pb << beta.amplitudes()(0), beta.amplitudes()(1);
        s.create_photon(0, pa, l0);
        s.create_photon(1, pb, lmix);
        s = optics::apply_element(std::move(s), optics::OpticalElement::hwp(M_PI / 8, 1));
        s = optics::apply_element(std::move(s), optics::OpticalElement::attenuator(t_bal, 0, 0, 2));
        s = optics::apply_element(std::move(s), optics::OpticalElement::attenuator(t_bal, 1, 0, 3));
        s = optics::apply_element(std::move(s), optics::OpticalElement::ppbs(1.0 / 3.0, 0, 1));
        s = optics::apply_element(std::move(s), optics::OpticalElement::hwp(M_PI / 8, 1));
        s = optics::apply_element(std::move(s), optics::OpticalElement::hwp(M_PI / 8, 0));
        const double p = s.post_select({0, 1}, {2, 3});
        if (rng.uniform() >= p) {
            ++retries;
            continue;
        }
        const auto a_branches = s.measure_polarization(0);
        const double p1 = a_branches[1].first;
        const int k1 = rng.uniform() < p1 ? 1 : 0;
        const auto& collapsed = a_branches[static_cast<std::size_t>(k1)].second;
        const auto b_branches = collapsed.measure_polarization(1);
        const int k2 = rng.uniform() < b_branches[1].first ? 1 : 0;
        return {k1, k2};
    }
    throw PostSelectionFailure("optical comparator never post-selected");
}

}  // namespace

ProtocolResult run_protocol(const DensityMatrix& rho_alpha, const DensityMatrix& rho_beta,
                            const ProtocolConfig& config) {
    if (config.n < 1) throw DimensionError("protocol needs n >= 1 copies");
    RandomStream alice_rng(config.alice_seed);
    RandomStream bob_rng(config.bob_seed);

    FheKeyPair kp = keygen(config.fhe, alice_rng);
    FheKeyPair rogue = keygen(config.fhe, alice_rng);

    ProtocolResult result;

    // Alice's message: encrypted qubits and encrypted pad keys
    struct Copy {
        PadKey pad;
        PureState cipher;
        CipherBit enc_a;
        CipherBit enc_b;
    };
    std::vector<Copy> copies;
    copies.reserve(static_cast<std::size_t>(config.n));
    auto make_copy = [&](RandomStream& rng) {
        const PureState plain = sample_pure(rho_alpha, rng);
        const PadKey pad = random_pad(rng);
        return Copy{pad, encrypt(plain, pad), enc(pad.a, kp.public_key, rng),
                    enc(pad.b, kp.public_key, rng)};
    };
    for (int i = 0; i < config.n; ++i) copies.push_back(make_copy(alice_rng));

    // Bob: comparator per copy, homomorphic key update, shuffle
    std::vector<std::pair<CipherBit, CipherBit>> updated;
    std::vector<std::pair<int, int>> outcomes;
    updated.reserve(copies.size());
    for (int i = 0; i < config.n; ++i) {
        const PureState beta = sample_pure(rho_beta, bob_rng);
        std::pair<int, int> k;
        if (config.backend == Backend::qubit) {
            k = comparator(copies[static_cast<std::size_t>(i)].cipher, beta, bob_rng);
        } else {
            int retries = 0;
            for (;;) {
                try {
                    k = optical_comparator(copies[static_cast<std::size_t>(i)].cipher, beta,
                                           config.noise, bob_rng, retries);
                    break;
                } catch (const PostSelectionFailure&) {
                    copies[static_cast<std::size_t>(i)] = make_copy(alice_rng);
                }
            }
            result.retried_copies += retries;
        }
        outcomes.push_back(k);
        updated.emplace_back(hxor_const(copies[static_cast<std::size_t>(i)].enc_a, k.first),
                             hxor_const(copies[static_cast<std::size_t>(i)].enc_b, k.second));
    }
    std::vector<std::size_t> perm(updated.size());
    std::iota(perm.begin(), perm.end(), 0);
    if (config.shuffle) {
        for (std::size_t i = perm.size(); i > 1; --i)
            std::swap(perm[i - 1], perm[bob_rng.index(i)]);
    }
    std::vector<std::pair<CipherBit, CipherBit>> returned;
    returned.reserve(updated.size());
    for (std::size_t i = 0; i < perm.size(); ++i) returned.push_back(updated[perm[i]]);

    // Alice decrypts and sums products over the integers
    const FheKeyPair& dec_kp = config.wrong_key ? rogue : kp;
    long sum = 0;
    std::vector<int> products;
    products.reserve(returned.size());
    for (const auto& [ez, ex] : returned) {
        const int u = dec(ez, dec_kp.secret);
        const int v = dec(ex, dec_kp.secret);
        products.push_back(u & v);
        sum += (u & v);
    }
    result.estimate = 2.0 * static_cast<double>(sum) / static_cast<double>(config.n);

    // views and transcript
    json msg_alice = {{"direction", "alice->bob"},
                      {"copies", config.n},
                      {"scheme", config.fhe.scheme == FheScheme::mock ? "mock" : "lwe_additive"}};
    if (config.transcript_states) {
        json states = json::array();
        for (const Copy& c : copies) {
            states.push_back({{"re0", c.cipher.amplitudes()(0).real()},
                              {"im0", c.cipher.amplitudes()(0).imag()},
                              {"re1", c.cipher.amplitudes()(1).real()},
                              {"im1", c.cipher.amplitudes()(1).imag()}});
        }
        msg_alice["ciphertexts"] = states;
    }
    json msg_bob = {{"direction", "bob->alice"}, {"returned", returned.size()}};
    json returned_hex = json::array();
    for (const auto& [ez, ex] : returned)
        returned_hex.push_back({{"enc_z", serialize::to_hex(ez.serialize())},
                                {"enc_x", serialize::to_hex(ex.serialize())}});
    msg_bob["cipher_pairs"] = returned_hex;

    result.transcript = {{"version", 1},
                         {"messages", json::array({msg_alice, msg_bob})},
                         {"n", config.n},
                         {"shuffled", config.shuffle}};
    result.alice_view = {{"received", msg_bob},
                         {"estimate", result.estimate},
                         {"wrong_key", config.wrong_key}};
    json perm_json = json::array();
    for (std::size_t p : perm) perm_json.push_back(p);
    json outcome_json = json::array();
    for (const auto& [k1, k2] : outcomes) outcome_json.push_back({{"k1", k1}, {"k2", k2}});
    result.bob_view = {{"permutation", perm_json}, {"outcomes", outcome_json}};
    return result;
}

LeakageReport leakage_probe(const DensityMatrix& bob_state, const LeakageConfig& config) {
    const auto& probes = pauli_eigenstates();
    const int k = static_cast<int>(probes.size());
    const int per = config.copies_per_probe;
    const int n = k * per;

    RandomStream alice_rng(config.alice_seed);
    RandomStream bob_rng(config.bob_seed);
    FheKeyPair kp = keygen(config.fhe, alice_rng);

    struct Item {
        CipherBit enc_a;
        CipherBit enc_b;
    };
    std::vector<Item> updated;
    updated.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const PureState& probe = probes[static_cast<std::size_t>(i / per)];
        const PadKey pad = random_pad(alice_rng);
        const PureState cipher = encrypt(probe, pad);
        CipherBit ea = enc(pad.a, kp.public_key, alice_rng);
        CipherBit eb = enc(pad.b, kp.public_key, alice_rng);
        const PureState beta = sample_pure(bob_state, bob_rng);
        const auto [k1, k2] = comparator(cipher, beta, bob_rng);
        updated.push_back({hxor_const(ea, k1), hxor_const(eb, k2)});
    }
    std::vector<std::size_t> perm(updated.size());
    std::iota(perm.begin(), perm.end(), 0);
    if (config.shuffle) {
        for (std::size_t i = perm.size(); i > 1; --i)
            std::swap(perm[i - 1], perm[bob_rng.index(i)]);
    }

    // Alice groups the returned items by her own schedule positions
    LeakageReport report;
    std::vector<std::pair<long, long>> groups;
    std::vector<double> overlap(static_cast<std::size_t>(k));
    for (int g = 0; g < k; ++g) {
        long ones = 0;
        for (int j = 0; j < per; ++j) {
            const Item& it = updated[perm[static_cast<std::size_t>(g * per + j)]];
            ones += dec(it.enc_a, kp.secret) & dec(it.enc_b, kp.secret);
        }
        groups.emplace_back(ones, per);
        const double est = 2.0 * static_cast<double>(ones) / per;
        report.per_probe_estimates.push_back(est);
        overlap[static_cast<std::size_t>(g)] = 1.0 - est;  // D^(2) estimate
    }
    long total_ones = 0;
    for (const auto& [s, m] : groups) total_ones += s;
    report.pooled_estimate = 2.0 * static_cast<double>(total_ones) / n;

    // probes ordered |0>,|1>,|+>,|->,|+i>,|-i>: overlap = (1 + p.r)/2
    report.bloch_estimate = Eigen::Vector3d(overlap[2] - overlap[3], overlap[4] - overlap[5],
                                            overlap[0] - overlap[1]);
    report.bloch_error = (report.bloch_estimate - bob_state.bloch_vector()).norm();
    report.homogeneity_pvalue = stats::homogeneity_pvalue(groups);
    return report;
}

}  // namespace qfhe::tpsc
