#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>

#include "qfhe/qotp.hpp"

using namespace qfhe;

namespace {

PureState plus_state() {
    Vec v(2);
    v << 1, 1;
    return PureState::from_amplitudes(v);
}

}  // namespace

TEST_CASE("encrypt basics") {
    const PureState zero = PureState::zero(1);
    CHECK(encrypt(zero, {0, 0}).equals_up_to_phase(zero));
    CHECK(encrypt(zero, {0, 1}).equals_up_to_phase(PureState::computational(1, 1)));
    const PureState minus = encrypt(plus_state(), {1, 0});
    CHECK(std::abs(minus.amplitudes()(0) + minus.amplitudes()(1)) < 1e-12);
}

TEST_CASE("decrypt inverts encrypt for every key and state") {
    RandomStream rng(11);
    std::vector<PureState> states = pauli_eigenstates();
    for (int i = 0; i < 10; ++i) states.push_back(PureState::haar_random(1, rng));
    for (const PureState& s : states)
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                CHECK(decrypt(encrypt(s, {a, b}), {a, b}).equals_up_to_phase(s));
}

TEST_CASE("wrong pad decrypts to a different state") {
    const PureState got = decrypt(encrypt(plus_state(), {0, 0}), {1, 0});
    CHECK(!got.equals_up_to_phase(plus_state()));
    CHECK(got.fidelity(plus_state()) == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("pad twirl yields the maximally mixed state") {
    RandomStream rng(23);
    std::vector<PureState> states = {PureState::zero(1), plus_state(),
                                     state_from_bloch(0.6, 0.0)};
    for (int i = 0; i < 20; ++i) states.push_back(PureState::haar_random(1, rng));
    for (const PureState& s : states) {
        const DensityMatrix avg = pad_twirl_check(s);
        CHECK((avg.matrix() - Mat::Identity(2, 2) / 2.0).norm() < 1e-12);
    }
}

TEST_CASE("key expression algebra") {
    const KeyExpr a = KeyExpr::symbol(Symbol::pad_a(0));
    const KeyExpr b = KeyExpr::symbol(Symbol::pad_b(0));
    SUBCASE("xor is involutive and commutative") {
        CHECK((a ^ a) == KeyExpr::zero());
        CHECK((a ^ b) == (b ^ a));
        CHECK(((a ^ b) ^ b) == a);
    }
    SUBCASE("evaluation is a homomorphism") {
        RandomStream rng(4);
        for (int trial = 0; trial < 50; ++trial) {
            std::map<Symbol, int> env{{Symbol::pad_a(0), rng.bit()},
                                      {Symbol::pad_b(0), rng.bit()},
                                      {Symbol::mask_q(0), rng.bit()}};
            const KeyExpr q = KeyExpr::symbol(Symbol::mask_q(0));
            const KeyExpr lhs = (a ^ b) ^ (b ^ q) ^ KeyExpr::one();
            const int direct = (env[Symbol::pad_a(0)] ^ env[Symbol::mask_q(0)]) ^ 1;
            CHECK(lhs.evaluate(env) == direct);
        }
    }
    SUBCASE("unbound symbol is an error") {
        CHECK_THROWS(a.evaluate({}));
    }
}

TEST_CASE("single-qubit key updates match the conjugation oracle") {
    const std::vector<GateKind> gates{GateKind::X, GateKind::Z, GateKind::H, GateKind::P,
                                      GateKind::Pdag};
    for (GateKind g : gates) {
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                std::vector<KeyExprPair> keys{{KeyExpr::symbol(Symbol::pad_a(0)),
                                               KeyExpr::symbol(Symbol::pad_b(0))}};
                key_update(g, {0}, keys);
                const std::map<Symbol, int> env{{Symbol::pad_a(0), a}, {Symbol::pad_b(0), b}};
                const auto oracle = conjugate_pauli(Gate::make(g), {{a}, {b}});
                CHECK(keys[0].z.evaluate(env) == oracle.word.z[0]);
                CHECK(keys[0].x.evaluate(env) == oracle.word.x[0]);
            }
    }
}

TEST_CASE("two-qubit key updates match the conjugation oracle") {
    for (GateKind g : {GateKind::CNOT, GateKind::CZ}) {
        for (int code = 0; code < 16; ++code) {
            const int a0 = code & 1, b0 = (code >> 1) & 1;
            const int a1 = (code >> 2) & 1, b1 = (code >> 3) & 1;
            std::vector<KeyExprPair> keys{
                {KeyExpr::symbol(Symbol::pad_a(0)), KeyExpr::symbol(Symbol::pad_b(0))},
                {KeyExpr::symbol(Symbol::pad_a(1)), KeyExpr::symbol(Symbol::pad_b(1))}};
            key_update(g, {0, 1}, keys);
            const std::map<Symbol, int> env{{Symbol::pad_a(0), a0},
                                            {Symbol::pad_b(0), b0},
                                            {Symbol::pad_a(1), a1},
                                            {Symbol::pad_b(1), b1}};
            const auto oracle = conjugate_pauli(Gate::make(g), {{a0, a1}, {b0, b1}});
            CHECK(keys[0].z.evaluate(env) == oracle.word.z[0]);
            CHECK(keys[0].x.evaluate(env) == oracle.word.x[0]);
            CHECK(keys[1].z.evaluate(env) == oracle.word.z[1]);
            CHECK(keys[1].x.evaluate(env) == oracle.word.x[1]);
        }
    }
}

TEST_CASE("clifford sequences keep the X key in {a, b, a+b}") {
    // every word over the single-qubit set, depth <= 4
    const std::vector<GateKind> gates{GateKind::X, GateKind::Z, GateKind::H, GateKind::P};
    const KeyExpr ea = KeyExpr::symbol(Symbol::pad_a(0));
    const KeyExpr eb = KeyExpr::symbol(Symbol::pad_b(0));
    std::vector<std::vector<KeyExprPair>> frontier{{{ea, eb}}};
    for (int depth = 0; depth < 4; ++depth) {
        std::vector<std::vector<KeyExprPair>> next;
        for (const auto& keys : frontier)
            for (GateKind g : gates) {
                auto k2 = keys;
                key_update(g, {0}, k2);
                const KeyExpr sym = k2[0].x.symbol_part();
                const bool canonical = sym == ea || sym == eb || sym == (ea ^ eb);
                CHECK(canonical);
                // constants never appear before a measurement happens
                CHECK(k2[0].x.constant() == 0);
                next.push_back(std::move(k2));
            }
        frontier = std::move(next);
    }
}

TEST_CASE("key_update rejects T") {
    std::vector<KeyExprPair> keys{{KeyExpr::zero(), KeyExpr::zero()}};
    CHECK_THROWS_AS(key_update(GateKind::T, {0}, keys), UnsupportedGateError);
}

TEST_CASE("ancilla realization") {
    // P|+> = (|0> + i|1>)/sqrt(2)
    const PureState xi = realize_ancilla(1, 0);
    CHECK(std::abs(xi.amplitudes()(1) / xi.amplitudes()(0) - Complex(0, 1)) < 1e-12);
    // Z P|+> = (|0> - i|1>)/sqrt(2)
    const PureState xi2 = realize_ancilla(1, 1);
    CHECK(std::abs(xi2.amplitudes()(1) / xi2.amplitudes()(0) + Complex(0, 1)) < 1e-12);
}
