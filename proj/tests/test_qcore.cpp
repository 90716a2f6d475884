#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qfhe/qcore.hpp"

using namespace qfhe;

namespace {

PureState ket(std::initializer_list<Complex> amps) {
    Vec v(static_cast<Eigen::Index>(amps.size()));
    Eigen::Index i = 0;
    for (const Complex& a : amps) v(i++) = a;
    return PureState::from_amplitudes(v);
}

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

}  // namespace

TEST_CASE("hadamard on |0> gives |+>") {
    const PureState out = apply_gate(PureState::zero(1), Gate::make(GateKind::H), {0});
    CHECK(out.amplitudes()(0).real() == doctest::Approx(kInvSqrt2).epsilon(1e-12));
    CHECK(out.amplitudes()(1).real() == doctest::Approx(kInvSqrt2).epsilon(1e-12));
}

TEST_CASE("T phases |1>") {
    const PureState out = apply_gate(ket({0, 1}), Gate::make(GateKind::T), {0});
    CHECK(std::abs(out.amplitudes()(1) - std::polar(1.0, M_PI / 4)) < 1e-12);
}

TEST_CASE("CNOT flips target when control set") {
    const PureState out =
        apply_gate(PureState::computational(2, 0b10), Gate::make(GateKind::CNOT), {0, 1});
    CHECK(std::abs(out.amplitude(0b11) - Complex(1, 0)) < 1e-12);
}

TEST_CASE("gate application with permuted targets") {
    // CNOT with control qubit 1, target qubit 0 on |01>
    const PureState out =
        apply_gate(PureState::computational(2, 0b01), Gate::make(GateKind::CNOT), {1, 0});
    CHECK(std::abs(out.amplitude(0b11) - Complex(1, 0)) < 1e-12);
}

TEST_CASE("norm and trace preservation") {
    RandomStream rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        const PureState s = PureState::haar_random(2, rng);
        const PureState out = apply_gate(s, Gate::make(GateKind::CZ), {0, 1});
        CHECK(std::abs(out.amplitudes().norm() - 1.0) < 1e-12);
        const DensityMatrix rho = apply_gate(s.projector(), Gate::make(GateKind::H), {1});
        CHECK(std::abs(rho.matrix().trace().real() - 1.0) < 1e-12);
        CHECK((rho.matrix() - rho.matrix().adjoint()).norm() < 1e-12);
    }
}

TEST_CASE("invalid states rejected") {
    Vec bad(3);
    bad << 1, 0, 0;
    CHECK_THROWS_AS(PureState::from_amplitudes(bad), DimensionError);
    CHECK_THROWS_AS(apply_gate(PureState::zero(1), Gate::make(GateKind::CNOT), {0, 1}),
                    DimensionError);
    Mat not_unitary = Mat::Ones(2, 2);
    CHECK_THROWS_AS(Gate::custom(not_unitary), DimensionError);
}

TEST_CASE("measurement basics") {
    RandomStream rng(3);
    SUBCASE("|0> is deterministic") {
        const auto r = measure_computational(PureState::zero(1), 0, rng);
        CHECK(r.outcome == 0);
        CHECK(r.probability == doctest::Approx(1.0));
    }
    SUBCASE("equatorial states are fair") {
        const PureState plus = ket({kInvSqrt2, kInvSqrt2});
        const PureState t_plus = ket({kInvSqrt2, std::polar(kInvSqrt2, M_PI / 4)});
        for (const PureState& s : {plus, t_plus}) {
            const auto b0 = measurement_branch(s, 0, 0);
            const auto b1 = measurement_branch(s, 0, 1);
            CHECK(b0->probability == doctest::Approx(0.5).epsilon(1e-12));
            CHECK(b1->probability == doctest::Approx(0.5).epsilon(1e-12));
        }
    }
    SUBCASE("zero-norm branch is empty") {
        CHECK(!measurement_branch(PureState::zero(1), 0, 1).has_value());
    }
}

TEST_CASE("measurement frequencies match Born rule at 5 sigma") {
    RandomStream rng(99);
    const PureState s = ket({std::sqrt(0.3), std::sqrt(0.7)});
    const int n = 20000;
    int ones = 0;
    for (int i = 0; i < n; ++i) {
        RandomStream shot = rng.derive(static_cast<std::uint64_t>(i));
        ones += measure_computational(s, 0, shot).outcome;
    }
    const double sigma = std::sqrt(0.3 * 0.7 * n);
    CHECK(std::abs(ones - 0.7 * n) < 5 * sigma);
}

TEST_CASE("conjugation oracle examples") {
    SUBCASE("H maps Z to X") {
        const auto r = conjugate_pauli(Gate::make(GateKind::H), {{1}, {0}});
        CHECK(r.word.z == std::vector<int>{0});
        CHECK(r.word.x == std::vector<int>{1});
        CHECK(r.residual.kind() == GateKind::I);
    }
    SUBCASE("T commutes with Z") {
        const auto r = conjugate_pauli(Gate::make(GateKind::T), {{0}, {0}});
        CHECK(r.word.z == std::vector<int>{0});
        CHECK(r.word.x == std::vector<int>{0});
        CHECK(r.residual.kind() == GateKind::I);
        CHECK(std::abs(r.phase - Complex(1, 0)) < 1e-12);
    }
    SUBCASE("T past X needs a P residual") {
        const auto r = conjugate_pauli(Gate::make(GateKind::T), {{0}, {1}});
        CHECK(r.residual.kind() == GateKind::P);
        CHECK(r.word.x == std::vector<int>{1});
    }
    SUBCASE("unsupported gate") {
        const Gate g = Gate::custom(Gate::make(GateKind::T).matrix() *
                                    Gate::make(GateKind::H).matrix());
        CHECK_THROWS_AS(conjugate_pauli(g, {{0}, {0}}), UnsupportedGateError);
    }
}

TEST_CASE("conjugation identity holds exactly for all Cliffords and pads") {
    const std::vector<GateKind> singles{GateKind::I, GateKind::X,    GateKind::Y, GateKind::Z,
                                        GateKind::H, GateKind::P,    GateKind::Pdag,
                                        GateKind::T};
    for (GateKind k : singles) {
        const Gate g = Gate::make(k);
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                const auto r = conjugate_pauli(g, {{a}, {b}});
                const Mat lhs = g.matrix() * pad_operator(a, b);
                const Mat rhs = r.phase * pad_operator(r.word.z[0], r.word.x[0]) *
                                r.residual.matrix() * g.matrix();
                CHECK((lhs - rhs).norm() < 1e-12);
                if (k != GateKind::T) CHECK(r.residual.kind() == GateKind::I);
            }
    }
    for (GateKind k : {GateKind::CNOT, GateKind::CZ}) {
        const Gate g = Gate::make(k);
        for (int code = 0; code < 16; ++code) {
            const PauliWord w{{code & 1, (code >> 1) & 1}, {(code >> 2) & 1, (code >> 3) & 1}};
            const auto r = conjugate_pauli(g, w);
            CHECK(r.residual.kind() == GateKind::I);
        }
    }
}

TEST_CASE("chi matrices of basic channels") {
    SUBCASE("identity") {
        const auto chi = channel_chi(Channel::from_unitary(pauli(0)));
        CHECK(std::abs(chi(0, 0) - Complex(1, 0)) < 1e-12);
        CHECK(chi.norm() == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("fully depolarizing") {
        const auto chi = channel_chi(Channel::depolarizing());
        CHECK((chi - Eigen::Matrix4cd::Identity() / 4.0).norm() < 1e-12);
    }
    SUBCASE("Z channel") {
        const auto chi = channel_chi(Channel::from_unitary(pauli(3)));
        CHECK(std::abs(chi(3, 3) - Complex(1, 0)) < 1e-12);
    }
    SUBCASE("multi-qubit rejected") {
        Channel two;
        two.kraus.push_back(Mat::Identity(4, 4));
        CHECK_THROWS_AS(channel_chi(two), UnsupportedGateError);
    }
}

TEST_CASE("chi round trip reproduces channel action on Pauli eigenstates") {
    RandomStream rng(5);
    // a few structured channels plus random unitaries
    std::vector<Channel> channels{Channel::from_unitary(Gate::make(GateKind::T).matrix()),
                                  Channel::depolarizing(0.3), Channel::depolarizing(1.0)};
    for (int i = 0; i < 5; ++i) {
        const PureState s = PureState::haar_random(1, rng);
        Mat u(2, 2);
        // random unitary from a Haar state pair via Gram-Schmidt
        u.col(0) = s.amplitudes();
        Vec other = PureState::haar_random(1, rng).amplitudes();
        other -= u.col(0).dot(other) * u.col(0);
        u.col(1) = other / other.norm();
        channels.push_back(Channel::from_unitary(u));
    }
    for (const Channel& ch : channels) {
        const Channel back = kraus_from_chi(channel_chi(ch));
        for (const PureState& s : pauli_eigenstates()) {
            const DensityMatrix direct = ch.apply(s.projector());
            const DensityMatrix via = back.apply(s.projector());
            CHECK((direct.matrix() - via.matrix()).norm() < 1e-10);
        }
    }
}

TEST_CASE("kraus validation catches non trace preserving sets") {
    Channel ch;
    ch.kraus.push_back(0.5 * pauli(0));
    CHECK_THROWS_AS(ch.validate(), DimensionError);
    ch.trace_preserving = false;
    CHECK_NOTHROW(ch.validate());
}
