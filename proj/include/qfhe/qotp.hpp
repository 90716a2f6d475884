#pragma once

#include <compare>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "qfhe/qcore.hpp"
#include "qfhe/random.hpp"

// Quantum one-time pad: Pauli encryption of single qubits and the classical
// GF(2) key algebra the evaluating party tracks alongside the quantum wires.

namespace qfhe {

struct PadKey {
    int a = 0;  // Z exponent
    int b = 0;  // X exponent
};

PadKey random_pad(RandomStream& rng);

// ciphertext = Z^a X^b |phi>
PureState encrypt(const PureState& plaintext, PadKey key);
PureState decrypt(const PureState& ciphertext, PadKey key);

// Average of encrypt(phi, k) projectors over all four pads; equals I/2.
DensityMatrix pad_twirl_check(const PureState& plaintext);

// Named GF(2) unknowns in key expressions. PadA/PadB are the per-wire pad
// bits, MaskQ/MaskR the ancilla masks, ProdAB the front-loaded product bit
// a*b, Meas a labelled measurement outcome.
struct Symbol {
    enum class Kind { PadA, PadB, MaskQ, MaskR, ProdAB, Meas };
    Kind kind;
    int wire = 0;
    int index = 0;  // distinguishes measurement symbols

    auto operator<=>(const Symbol&) const = default;
    std::string to_string() const;

    static Symbol pad_a(int wire) { return {Kind::PadA, wire, 0}; }
    static Symbol pad_b(int wire) { return {Kind::PadB, wire, 0}; }
    static Symbol mask_q(int wire) { return {Kind::MaskQ, wire, 0}; }
    static Symbol mask_r(int wire) { return {Kind::MaskR, wire, 0}; }
    static Symbol prod_ab(int wire) { return {Kind::ProdAB, wire, 0}; }
    static Symbol meas(int index) { return {Kind::Meas, 0, index}; }
};

// Affine expression over GF(2): constant + XOR of symbols. Affine (not
// linear) because measurement outcomes and the phase-add rules inject
// constants into the masks.
class KeyExpr {
public:
    KeyExpr() = default;
    static KeyExpr zero() { return {}; }
    static KeyExpr one();
    static KeyExpr symbol(Symbol s);

    KeyExpr& operator^=(const KeyExpr& other);
    friend KeyExpr operator^(KeyExpr lhs, const KeyExpr& rhs) { return lhs ^= rhs; }
    bool operator==(const KeyExpr&) const = default;

    int constant() const { return constant_; }
    const std::set<Symbol>& symbols() const { return symbols_; }
    KeyExpr symbol_part() const;

    int evaluate(const std::map<Symbol, int>& env) const;
    std::string to_string() const;

private:
    int constant_ = 0;
    std::set<Symbol> symbols_;
};

struct KeyExprPair {
    KeyExpr z;  // decryption Z exponent
    KeyExpr x;  // decryption X exponent
};

// Clifford key transformation. `wires` index into `keys`; supported gates are
// X, Z, H, P, Pdag, CNOT (control first), CZ. T is handled by the evaluator's
// gadget, not here.
void key_update(GateKind gate, const std::vector<int>& wires, std::vector<KeyExprPair>& keys);

struct AncillaSpec {
    enum class Kind { XiA, XiB };
    Kind kind;
    int wire = 0;
};

// Z^mask P^phase |+>
PureState realize_ancilla(int phase_bit, int mask_bit);

}  // namespace qfhe
