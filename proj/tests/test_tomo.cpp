#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qfhe/tomo.hpp"

using namespace qfhe;
using namespace qfhe::tomo;

namespace {

// exact expected counts for a known channel, no sampling noise
TomoCounts counts_from_channel(const Channel& ch, const TomoPlan& plan) {
    TomoCounts out;
    out.plan = plan;
    out.counts.assign(plan.preparations.size(),
                      std::vector<std::array<double, 2>>(plan.bases.size(), {0.0, 0.0}));
    for (std::size_t pi = 0; pi < plan.preparations.size(); ++pi) {
        const DensityMatrix rho = ch.apply(plan.preparations[pi].projector());
        for (std::size_t bi = 0; bi < plan.bases.size(); ++bi) {
            const double p1 = pauli_outcome_prob_one(rho, static_cast<int>(plan.bases[bi]));
            out.counts[pi][bi][0] = plan.shots_per_setting * (1.0 - p1);
            out.counts[pi][bi][1] = plan.shots_per_setting * p1;
        }
    }
    return out;
}

double chi_error(const ProcessMatrix& a, const ProcessMatrix& b) {
    return (a.chi - b.chi).norm();
}

}  // namespace

TEST_CASE("identity pipeline gives chi_00 = 1") {
    RandomStream rng(1);
    const TomoPlan plan = TomoPlan::standard(10000);
    const TomoCounts counts = run_tomography(ideal_pipeline(Gate::make(GateKind::I)), plan, rng);
    const ProcessMatrix chi = reconstruct(counts);
    CHECK(chi.chi(0, 0).real() > 0.99);
    // and prep |0> measured in Z never flips
    const auto& cell = counts.counts[0][2];
    CHECK(cell[1] == 0.0);
}

TEST_CASE("ideal T pipeline statistics") {
    RandomStream rng(2);
    TomoPlan plan = TomoPlan::standard(20000);
    const TomoCounts counts =
        run_tomography(ideal_pipeline(Gate::make(GateKind::T)), plan, rng);
    // prep |+> (index 2), measure X (index 0): P(0) = cos^2(pi/8)
    const auto& cell = counts.counts[2][0];
    const double p0 = cell[0] / (cell[0] + cell[1]);
    const double want = std::cos(M_PI / 8) * std::cos(M_PI / 8);
    CHECK(std::abs(p0 - want) < 5 * std::sqrt(want * (1 - want) / 20000));
}

TEST_CASE("depolarizing pipeline reconstructs to I/4") {
    RandomStream rng(3);
    const TomoCounts counts =
        run_tomography(depolarizing_pipeline(), TomoPlan::standard(20000), rng);
    const ProcessMatrix chi = reconstruct(counts);
    CHECK(chi_error(chi, chi_depolarizing()) < 0.05);
}

TEST_CASE("reconstruction from exact counts is numerically exact") {
    const TomoPlan plan = TomoPlan::standard(1000);
    SUBCASE("T gate chi pattern") {
        const Mat t = Gate::make(GateKind::T).matrix();
        const ProcessMatrix chi =
            reconstruct(counts_from_channel(Channel::from_unitary(t), plan));
        const ProcessMatrix want = chi_of_unitary(t);
        CHECK(chi_error(chi, want) < 1e-8);
        const double c2 = std::cos(M_PI / 8) * std::cos(M_PI / 8);
        CHECK(chi.chi(0, 0).real() == doctest::Approx(c2).epsilon(1e-6));
        CHECK(chi.chi(3, 3).real() == doctest::Approx(1 - c2).epsilon(1e-6));
        CHECK(std::abs(chi.chi(0, 3) - std::conj(chi.chi(3, 0))) < 1e-10);
        CHECK(std::abs(chi.chi(0, 3).imag()) > 0.3);  // the i-symmetric cross term
    }
    SUBCASE("agreement with channel_chi on structured channels") {
        for (const Channel& ch :
             {Channel::depolarizing(0.7), Channel::from_unitary(Gate::make(GateKind::H).matrix()),
              Channel::from_unitary(Gate::make(GateKind::P).matrix())}) {
            const ProcessMatrix got = reconstruct(counts_from_channel(ch, plan));
            CHECK((got.chi - channel_chi(ch)).norm() < 1e-8);
        }
    }
}

TEST_CASE("reconstruction error shrinks from 1e3 to 1e5 shots in expectation") {
    const Mat target = Gate::make(GateKind::T).matrix();
    const ProcessMatrix want = chi_of_unitary(target);
    double err_small = 0, err_large = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        RandomStream rng_small(900 + seed), rng_large(1900 + seed);
        const TomoCounts c1 = run_tomography(ideal_pipeline(Gate::custom(target)),
                                             TomoPlan::standard(1000), rng_small);
        const TomoCounts c2 = run_tomography(ideal_pipeline(Gate::custom(target)),
                                             TomoPlan::standard(100000), rng_large);
        err_small += chi_error(reconstruct(c1), want);
        err_large += chi_error(reconstruct(c2), want);
    }
    CHECK(err_large < err_small);
    CHECK(err_small / 10 < 0.1);
    CHECK(err_large / 10 < 0.02);
}

TEST_CASE("reconstructed chi is always physical") {
    RandomStream rng(7);
    for (int trial = 0; trial < 5; ++trial) {
        RandomStream run_rng = rng.derive(static_cast<std::uint64_t>(trial));
        const TomoCounts counts = run_tomography(
            ideal_pipeline(Gate::make(GateKind::H)), TomoPlan::standard(200), run_rng);
        const ProcessMatrix chi = reconstruct(counts);
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(chi.chi);
        CHECK(es.eigenvalues().minCoeff() > -1e-8);
        CHECK(chi.chi.trace().real() == doctest::Approx(1.0).epsilon(1e-8));
        CHECK((chi.chi - chi.chi.adjoint()).norm() < 1e-10);
    }
}

TEST_CASE("rank-deficient preparations are rejected") {
    TomoPlan plan;
    plan.preparations = {PureState::zero(1), PureState::computational(1, 1)};
    plan.bases = {PauliAxis::Z};
    plan.shots_per_setting = 100;
    CHECK_THROWS_AS(plan.validate(), DimensionError);
}

TEST_CASE("average fidelity") {
    SUBCASE("unitary against itself") {
        for (GateKind k : {GateKind::T, GateKind::H, GateKind::P}) {
            const ProcessMatrix chi = chi_of_unitary(Gate::make(k).matrix());
            CHECK(average_fidelity(chi, Gate::make(k)) == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
    SUBCASE("depolarizing scores one half against any unitary") {
        for (GateKind k : {GateKind::I, GateKind::T, GateKind::H}) {
            CHECK(average_fidelity(chi_depolarizing(), Gate::make(k)) ==
                  doctest::Approx(0.5).epsilon(1e-12));
        }
    }
    SUBCASE("orthogonal Paulis score one third") {
        const ProcessMatrix chi_z = chi_of_unitary(pauli(3));
        CHECK(average_fidelity(chi_z, Gate::make(GateKind::I)) ==
              doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    }
    SUBCASE("non-normalized chi rejected") {
        ProcessMatrix bad{2.0 * Eigen::Matrix4cd::Identity()};
        CHECK_THROWS_AS(average_fidelity(bad, Gate::make(GateKind::I)), DimensionError);
    }
}

TEST_CASE("process fidelity between channels") {
    CHECK(process_fidelity(chi_depolarizing(), chi_depolarizing()) ==
          doctest::Approx(1.0).epsilon(1e-10));
    const ProcessMatrix t = chi_of_unitary(Gate::make(GateKind::T).matrix());
    CHECK(process_fidelity(t, t) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(process_fidelity(chi_depolarizing(), t) == doctest::Approx(0.25).epsilon(1e-10));
}

TEST_CASE("bloch export") {
    SUBCASE("identity maps the grid to itself") {
        const auto map = bloch_export(chi_of_unitary(pauli(0)), 7, 8);
        for (const auto& row : map.rows) {
            CHECK((row.output - row.input).norm() < 1e-10);
            CHECK(row.input.norm() == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
    SUBCASE("depolarizing maps everything to the origin") {
        const auto map = bloch_export(chi_depolarizing(), 5, 6);
        for (const auto& row : map.rows) CHECK(row.output.norm() < 1e-10);
    }
    SUBCASE("T rotates the equator by 45 degrees") {
        Eigen::Matrix3d m;
        Eigen::Vector3d t;
        bloch_action(chi_of_unitary(Gate::make(GateKind::T).matrix()), m, t);
        const Eigen::Vector3d x = m * Eigen::Vector3d(1, 0, 0);
        CHECK(x(0) == doctest::Approx(std::cos(M_PI / 4)).epsilon(1e-10));
        CHECK(x(1) == doctest::Approx(std::sin(M_PI / 4)).epsilon(1e-10));
        CHECK(t.norm() < 1e-10);
    }
}

TEST_CASE("mle refinement does not degrade the estimate") {
    RandomStream rng(40);
    const Mat target = Gate::make(GateKind::T).matrix();
    const TomoCounts counts =
        run_tomography(ideal_pipeline(Gate::custom(target)), TomoPlan::standard(500), rng);
    const ProcessMatrix linear = reconstruct(counts);
    ReconstructOptions opts;
    opts.mle_refine = true;
    const ProcessMatrix refined = reconstruct(counts, opts);
    const ProcessMatrix want = chi_of_unitary(target);
    CHECK(chi_error(refined, want) < chi_error(linear, want) + 0.02);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(refined.chi);
    CHECK(es.eigenvalues().minCoeff() > -1e-8);
}

TEST_CASE("thread count does not change the counts") {
    const TomoPlan plan = TomoPlan::standard(400);
    RandomStream rng1(4242), rng2(4242);
    const TomoCounts a = run_tomography(ideal_pipeline(Gate::make(GateKind::H)), plan, rng1, 1);
    const TomoCounts b = run_tomography(ideal_pipeline(Gate::make(GateKind::H)), plan, rng2, 4);
    CHECK(a.counts == b.counts);
}

TEST_CASE("qfhe qubit pipeline reaches unit fidelity") {
    RandomStream rng(50);
    const CircuitDescription circuit = CircuitDescription::canonical(CanonicalCase::th);
    const Pipeline pipe = qfhe_qubit_pipeline(circuit, FheParams::mock_defaults(), false, 1);
    const TomoCounts counts = run_tomography(pipe, TomoPlan::standard(4000), rng, 2);
    const ProcessMatrix chi = reconstruct(counts);
    CHECK(average_fidelity(chi, canonical_case_unitary(CanonicalCase::th)) > 0.995);
}

TEST_CASE("background injection lowers fidelity and subtraction recovers it") {
    RandomStream rng(60);
    const Gate target = Gate::make(GateKind::T);
    TomoCounts counts =
        run_tomography(ideal_pipeline(target), TomoPlan::standard(20000), rng);
    const double clean = average_fidelity(reconstruct(counts), target);
    RandomStream bg_rng(61);
    inject_background(counts, 0.25, bg_rng);
    const double dirty = average_fidelity(reconstruct(counts), target);
    subtract_background(counts, 0.25);
    const double corrected = average_fidelity(reconstruct(counts), target);
    CHECK(dirty < clean - 0.02);
    CHECK(corrected > dirty + 0.02);
    CHECK(corrected > clean - 0.02);
}

TEST_CASE("optics pipeline matches the qubit pipeline when noiseless") {
    const CircuitDescription circuit = CircuitDescription::canonical(CanonicalCase::t);
    const OpticsPipeline pipe(circuit, optics::NoiseParams::noiseless(),
                              FheParams::mock_defaults(), false, 7);
    RandomStream rng(70);
    const TomoCounts counts = run_tomography(
        [&pipe](const PureState& prep, PauliAxis basis, RandomStream& shot_rng) {
            return pipe(prep, basis, shot_rng);
        },
        TomoPlan::standard(4000), rng, 2);
    const ProcessMatrix chi = reconstruct(counts);
    CHECK(average_fidelity(chi, canonical_case_unitary(CanonicalCase::t)) > 0.99);
    CHECK(pipe.discarded() > 0);  // post-selection failures were tallied
}
