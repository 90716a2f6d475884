#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qfhe/tpsc.hpp"

using namespace qfhe;
using namespace qfhe::tpsc;

namespace {

PureState bloch(double theta, double phi) { return state_from_bloch(theta, phi); }

}  // namespace

TEST_CASE("comparator distribution matches the two-qubit amplitudes") {
    SUBCASE("identical states never anti-coincide") {
        RandomStream rng(1);
        for (int i = 0; i < 10; ++i) {
            const PureState s = PureState::haar_random(1, rng);
            CHECK(comparator_distribution(s, s)[3] < 1e-12);
        }
    }
    SUBCASE("orthogonal states anti-coincide half the time") {
        const auto probs = comparator_distribution(PureState::zero(1),
                                                   PureState::computational(1, 1));
        CHECK(probs[3] == doctest::Approx(0.5).epsilon(1e-12));
    }
    SUBCASE("|0> against |+> gives one quarter") {
        const auto probs = comparator_distribution(PureState::zero(1), pauli_eigenstates()[2]);
        CHECK(probs[3] == doctest::Approx(0.25).epsilon(1e-12));
    }
}

TEST_CASE("outcome-to-key pairing oracle: exhaustive over pads and a state grid") {
    // Fixes the convention: decrypted product (k1+a)(k2+b) must average to
    // the plaintext comparator's (1,1) probability for every pad.
    for (int ia = 0; ia < 5; ++ia)
        for (int ja = 0; ja < 4; ++ja) {
            const PureState alpha = bloch(M_PI * ia / 4.0, M_PI * ja / 2.0);
            const PureState beta = bloch(M_PI * ja / 4.0, M_PI * ia / 2.5);
            const double want = 0.5 * (1.0 - alpha.fidelity(beta));
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b) {
                    const auto probs = comparator_distribution(encrypt(alpha, {a, b}), beta);
                    double got = 0;
                    for (int m1 = 0; m1 < 2; ++m1)
                        for (int m2 = 0; m2 < 2; ++m2)
                            got += probs[static_cast<std::size_t>(m1 * 2 + m2)] *
                                   ((m1 ^ a) & (m2 ^ b));
                    REQUIRE(std::abs(got - want) < 1e-10);
                }
        }
}

TEST_CASE("true overlap") {
    const DensityMatrix zero = PureState::zero(1).projector();
    const DensityMatrix plus = pauli_eigenstates()[2].projector();
    CHECK(true_overlap(zero, zero) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(true_overlap(zero, plus) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(true_overlap(zero, DensityMatrix::maximally_mixed(1)) ==
          doctest::Approx(0.5).epsilon(1e-12));
    // reduces to |<a|b>|^2 for pure states
    RandomStream rng(2);
    for (int i = 0; i < 10; ++i) {
        const PureState a = PureState::haar_random(1, rng);
        const PureState b = PureState::haar_random(1, rng);
        CHECK(true_overlap(a.projector(), b.projector()) ==
              doctest::Approx(a.fidelity(b)).epsilon(1e-10));
    }
    // non-physical matrices cannot even be constructed
    Mat bad(2, 2);
    bad << 1.5, 0, 0, -0.5;
    CHECK_THROWS_AS(DensityMatrix::from_matrix(bad), DimensionError);
}

TEST_CASE("sampled pure states reproduce the density matrix") {
    RandomStream rng(3);
    Mat m(2, 2);
    m << 0.7, 0.1, 0.1, 0.3;
    const DensityMatrix rho = DensityMatrix::from_matrix(m);
    Mat acc = Mat::Zero(2, 2);
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        const PureState s = sample_pure(rho, rng);
        acc += s.amplitudes() * s.amplitudes().adjoint();
    }
    CHECK((acc / n - rho.matrix()).norm() < 0.02);
}

TEST_CASE("protocol estimates track the appendix formula") {
    ProtocolConfig config;
    config.n = 10000;
    SUBCASE("identical pure states give zero") {
        const auto r = run_protocol(PureState::zero(1).projector(),
                                    PureState::zero(1).projector(), config);
        CHECK(std::abs(r.estimate) < 0.01);
    }
    SUBCASE("orthogonal pure states give one") {
        const auto r = run_protocol(PureState::zero(1).projector(),
                                    PureState::computational(1, 1).projector(), config);
        CHECK(std::abs(r.estimate - 1.0) < 0.03);
    }
    SUBCASE("maximally mixed partner pins the estimate at one half") {
        config.alice_seed = 5;
        const auto r = run_protocol(pauli_eigenstates()[4].projector(),
                                    DensityMatrix::maximally_mixed(1), config);
        CHECK(std::abs(r.estimate - 0.5) < 0.03);
    }
}

TEST_CASE("estimator is unbiased across a Bloch grid within four sigma") {
    ProtocolConfig config;
    config.n = 10000;
    int idx = 0;
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) {
            const DensityMatrix rho_a = bloch(M_PI * i / 4.0, 0.3).projector();
            const DensityMatrix rho_b = bloch(M_PI * j / 4.0, 1.1).projector();
            config.alice_seed = 100 + static_cast<std::uint64_t>(idx);
            config.bob_seed = 200 + static_cast<std::uint64_t>(idx);
            ++idx;
            const double want = 1.0 - true_overlap(rho_a, rho_b);
            const auto r = run_protocol(rho_a, rho_b, config);
            const double p = want / 2.0;
            const double sigma = 2.0 * std::sqrt(std::max(p * (1 - p), 1e-9) / config.n);
            CHECK(std::abs(r.estimate - want) < std::max(4 * sigma, 0.01));
        }
}

TEST_CASE("permutation leaves the estimate unchanged") {
    ProtocolConfig with, without;
    with.n = without.n = 2000;
    with.shuffle = true;
    without.shuffle = false;
    const DensityMatrix a = bloch(1.0, 0.4).projector();
    const DensityMatrix b = bloch(2.0, 2.2).projector();
    const auto r1 = run_protocol(a, b, with);
    const auto r2 = run_protocol(a, b, without);
    CHECK(r1.estimate == doctest::Approx(r2.estimate).epsilon(1e-12));
    // the permutation lives in Bob's view only
    CHECK(r1.bob_view.contains("permutation"));
    CHECK(!r1.alice_view.dump().empty());
    CHECK(r1.alice_view.dump().find("permutation") == std::string::npos);
}

TEST_CASE("wrong-key estimates hover at one half") {
    ProtocolConfig config;
    config.n = 10000;
    config.wrong_key = true;
    int point = 0;
    for (double theta : {0.0, 1.0, 2.0}) {
        config.alice_seed = 300 + static_cast<std::uint64_t>(point);
        config.bob_seed = 400 + static_cast<std::uint64_t>(point);
        ++point;
        const auto r = run_protocol(bloch(theta, 0.0).projector(),
                                    PureState::zero(1).projector(), config);
        CHECK(std::abs(r.estimate - 0.5) < 0.03);
    }
}

TEST_CASE("transcript structure") {
    ProtocolConfig config;
    config.n = 16;
    config.transcript_states = true;
    const auto r = run_protocol(PureState::zero(1).projector(),
                                PureState::zero(1).projector(), config);
    REQUIRE(r.transcript.contains("messages"));
    CHECK(r.transcript["messages"].size() == 2);
    CHECK(r.transcript["messages"][0]["ciphertexts"].size() == 16);
    CHECK(r.transcript["messages"][1]["cipher_pairs"].size() == 16);
}

TEST_CASE("photonic comparator smoke run with retries") {
    ProtocolConfig config;
    config.n = 60;
    config.backend = Backend::optics;
    config.noise = optics::NoiseParams::noiseless();
    const auto same = run_protocol(PureState::zero(1).projector(),
                                   PureState::zero(1).projector(), config);
    CHECK(same.retried_copies > 0);  // 1/9 post-selection forces retries
    CHECK(same.estimate < 0.25);
    config.alice_seed = 9;
    config.bob_seed = 10;
    const auto orth = run_protocol(PureState::zero(1).projector(),
                                   PureState::computational(1, 1).projector(), config);
    CHECK(orth.estimate > 0.7);
}

TEST_CASE("leakage probe: shuffle defeats the probe-state attack") {
    const DensityMatrix bob = PureState::zero(1).projector();
    SUBCASE("without the shuffle the Bloch vector is reconstructed") {
        LeakageConfig config;
        config.shuffle = false;
        const auto report = leakage_probe(bob, config);
        CHECK(report.bloch_error < 0.1);
    }
    SUBCASE("with the shuffle the per-probe statistics are homogeneous") {
        LeakageConfig config;
        config.shuffle = true;
        const auto report = leakage_probe(bob, config);
        CHECK(report.homogeneity_pvalue > 0.01);
        // and the pooled estimate is unaffected by the grouping
        double mean = 0;
        for (double e : report.per_probe_estimates) mean += e;
        mean /= static_cast<double>(report.per_probe_estimates.size());
        CHECK(mean == doctest::Approx(report.pooled_estimate).epsilon(1e-9));
    }
}
